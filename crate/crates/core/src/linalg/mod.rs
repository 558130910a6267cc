//! Dense complex matrices at a configurable working precision.
//!
//! Dimensions here never exceed a few hundred, so everything is plain
//! row-major storage and textbook O(n^3) kernels with a fixed loop order:
//! identical inputs give bit-identical outputs.

mod dump;
mod eigen;
mod functions;
mod partial;

pub use dump::{read_dump, write_dump};
pub use eigen::{hermitian_eigen, SpectralDecomposition};
pub use functions::{func_hermitian, SpectralFunction};
pub use partial::{partial_trace_b, weighted_partial_trace_b};

use std::ops::{Add, Index, IndexMut, Sub};

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// A square complex matrix of dimension `dim`, stored row-major.
#[derive(Clone, PartialEq)]
pub struct DenseOperator<T> {
    dim: usize,
    data: Vec<Cplx<T>>,
}

impl<T: Real> DenseOperator<T> {
    pub fn zeros(dim: usize) -> Self {
        DenseOperator {
            dim,
            data: vec![Cplx::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Cplx::one();
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Cplx<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        DenseOperator { dim, data }
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Cplx::real(d);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_entries(dim: usize, data: Vec<Cplx<T>>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Usage(format!(
                "expected {} entries for dimension {dim}, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(DenseOperator { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Mantissa precision P of the entries.
    pub fn precision(&self) -> u32 {
        T::BITS
    }

    pub fn entries(&self) -> &[Cplx<T>] {
        &self.data
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im.is_zero())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: T) -> Self {
        DenseOperator {
            dim: self.dim,
            data: self.data.iter().map(|z| z.scale(s)).collect(),
        }
    }

    /// `self + s * I`
    pub fn add_identity(&self, s: T) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m[(i, i)].re += s;
        }
        m
    }

    pub fn trace(&self) -> Cplx<T> {
        let mut acc = Cplx::zero();
        for i in 0..self.dim {
            acc += self[(i, i)];
        }
        acc
    }

    pub fn frobenius_norm(&self) -> T {
        let mut acc = T::zero();
        for z in &self.data {
            acc += z.norm_sqr();
        }
        acc.sqrt()
    }

    /// Frobenius norm divided by sqrt(dim): the root-sum-square of the
    /// Pauli-expansion coefficients for a qubit operator.
    pub fn normalized_norm(&self) -> T {
        self.frobenius_norm() / T::from_f64(self.dim as f64).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc.max(z.re.abs()).max(z.im.abs()))
    }

    /// ||M - M^dagger||_F
    pub fn hermiticity_defect(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Errors unless `||M - M^dagger||_F <= 2^(-P + shift) * max(||M||_F, 1)`.
    pub fn check_hermitian(&self, shift: i32) -> Result<()> {
        let defect = self.hermiticity_defect();
        let bound = T::tol(shift) * self.frobenius_norm().max(T::one());
        if defect > bound {
            return Err(Error::Usage(format!(
                "matrix is not Hermitian: ||M - M^dagger||_F = {:e} exceeds {:e}",
                defect.to_f64(),
                bound.to_f64()
            )));
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matmul");
        let n = self.dim;
        if self.is_real() && other.is_real() {
            let a: Vec<T> = self.data.iter().map(|z| z.re).collect();
            let b: Vec<T> = other.data.iter().map(|z| z.re).collect();
            let mut c = vec![T::zero(); n * n];
            for i in 0..n {
                let row = &mut c[i * n..(i + 1) * n];
                for k in 0..n {
                    let aik = a[i * n + k];
                    if aik.is_zero() {
                        continue;
                    }
                    let brow = &b[k * n..(k + 1) * n];
                    for (cij, &bkj) in row.iter_mut().zip(brow) {
                        *cij += aik * bkj;
                    }
                }
            }
            return DenseOperator {
                dim: n,
                data: c.into_iter().map(Cplx::real).collect(),
            };
        }
        let mut c = vec![Cplx::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = self.data[i * n + k];
                if aik.is_zero() {
                    continue;
                }
                for j in 0..n {
                    c[i * n + j] += aik * other.data[k * n + j];
                }
            }
        }
        DenseOperator { dim: n, data: c }
    }

    /// `A B + B A`
    pub fn anticommutator(&self, other: &Self) -> Self {
        &self.matmul(other) + &other.matmul(self)
    }

    /// Kronecker product `self ⊗ other`; `self` occupies the more significant index.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |i, j| self[(i / m, j / m)] * other[(i % m, j % m)])
    }

    /// Drops imaginary parts at or below `2^(-P + shift)` times the largest entry.
    pub fn with_imag_cleaned(&self, shift: i32) -> Self {
        let cut = T::tol(shift) * self.max_abs();
        DenseOperator {
            dim: self.dim,
            data: self
                .data
                .iter()
                .map(|z| {
                    if z.im.abs() <= cut {
                        Cplx::real(z.re)
                    } else {
                        *z
                    }
                })
                .collect(),
        }
    }

    /// Lossy conversion to f64 pairs, row-major.
    pub fn to_f64_entries(&self) -> Vec<(f64, f64)> {
        self.data.iter().map(|z| (z.re.to_f64(), z.im.to_f64())).collect()
    }
}

impl<T: Real> Index<(usize, usize)> for DenseOperator<T> {
    type Output = Cplx<T>;
    #[inline(always)]
    fn index(&self, (i, j): (usize, usize)) -> &Cplx<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for DenseOperator<T> {
    #[inline(always)]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cplx<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Add for &DenseOperator<T> {
    type Output = DenseOperator<T>;
    fn add(self, rhs: &DenseOperator<T>) -> DenseOperator<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in add");
        DenseOperator {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &DenseOperator<T> {
    type Output = DenseOperator<T>;
    fn sub(self, rhs: &DenseOperator<T>) -> DenseOperator<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sub");
        DenseOperator {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Real> std::fmt::Debug for DenseOperator<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "DenseOperator(dim = {}, P = {})", self.dim, T::BITS)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.3e}{:+.3e}i", z.re.to_f64(), z.im.to_f64())
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Dd;

    #[test]
    fn matmul_real_and_complex_paths_agree() {
        let a = testing::random_hermitian::<Dd>(6, 1, false);
        let b = testing::random_hermitian::<Dd>(6, 2, false);
        let fast = a.matmul(&b);
        // force the complex kernel by adding and removing an imaginary entry
        let mut bc = b.clone();
        bc[(0, 1)].im = Dd::from_f64(1.0);
        let mut slow = a.matmul(&bc);
        for i in 0..6 {
            slow[(i, 1)] -= a[(i, 0)] * Cplx::new(Dd::zero(), Dd::one());
        }
        assert!((&fast - &slow).frobenius_norm().to_f64() < 1e-29);
    }

    #[test]
    fn kron_and_trace() {
        let z = DenseOperator::<f64>::from_real_diagonal(&[1.0, -1.0]);
        let i2 = DenseOperator::<f64>::identity(2);
        let zi = z.kron(&i2);
        assert_eq!(zi[(2, 2)].re, -1.0);
        assert_eq!(zi[(1, 1)].re, 1.0);
        assert_eq!(zi.trace().re, 0.0);
        assert_eq!(DenseOperator::<f64>::identity(4).trace().re, 4.0);
    }

    #[test]
    fn hermiticity_check() {
        let mut m = testing::random_hermitian::<f64>(4, 3, true);
        assert!(m.check_hermitian(8).is_ok());
        m[(0, 1)].im += 1e-3;
        assert!(matches!(m.check_hermitian(8), Err(Error::Usage(_))));
    }
}
