//! Cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Row-cyclic sweep order, no pivoting, no threads: the output depends only on
//! the input bits. Real symmetric inputs take a real-arithmetic path that is
//! about four times cheaper.

use super::DenseOperator;
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

const MAX_SWEEPS: usize = 100;

/// `M = V diag(eigenvalues) V^dagger` with eigenvalues ascending.
#[derive(Clone)]
pub struct SpectralDecomposition<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: DenseOperator<T>,
}

impl<T: Real> std::fmt::Debug for SpectralDecomposition<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralDecomposition")
            .field("eigenvalues", &self.eigenvalues)
            .field("eigenvectors", &self.eigenvectors)
            .finish()
    }
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(f(lambda)) V^dagger`
    pub fn reconstruct(&self, f: impl Fn(T) -> T) -> DenseOperator<T> {
        let w: Vec<T> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        self.reconstruct_weighted(&w)
    }

    /// `V diag(w) V^dagger` for explicit weights.
    pub fn reconstruct_weighted(&self, w: &[T]) -> DenseOperator<T> {
        let n = self.dim();
        let v = &self.eigenvectors;
        let mut out = DenseOperator::zeros(n);
        if v.is_real() {
            let vr: Vec<T> = v.entries().iter().map(|z| z.re).collect();
            for i in 0..n {
                for j in i..n {
                    let mut acc = T::zero();
                    for k in 0..n {
                        acc += vr[i * n + k] * w[k] * vr[j * n + k];
                    }
                    out[(i, j)] = Cplx::real(acc);
                    out[(j, i)] = Cplx::real(acc);
                }
            }
            return out;
        }
        for i in 0..n {
            for j in i..n {
                let mut acc = Cplx::zero();
                for k in 0..n {
                    acc += (v[(i, k)] * v[(j, k)].conj()).scale(w[k]);
                }
                if i == j {
                    acc.im = T::zero();
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
        }
        out
    }

    /// `||M V - V Lambda||_F`
    pub fn residual(&self, m: &DenseOperator<T>) -> T {
        let mv = m.matmul(&self.eigenvectors);
        let n = self.dim();
        let mut acc = T::zero();
        for i in 0..n {
            for k in 0..n {
                let r = mv[(i, k)] - self.eigenvectors[(i, k)].scale(self.eigenvalues[k]);
                acc += r.norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `||V^dagger V - I||_F`
    pub fn orthogonality_defect(&self) -> T {
        let v = &self.eigenvectors;
        let g = v.adjoint().matmul(v);
        (&g - &DenseOperator::identity(self.dim())).frobenius_norm()
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Fails with a usage error when `M` is not Hermitian within
/// `2^(-P+8) * ||M||_F` and with a numerical error if the sweeps do not converge.
pub fn hermitian_eigen<T: Real>(m: &DenseOperator<T>) -> Result<SpectralDecomposition<T>> {
    m.check_hermitian(8)?;
    let n = m.dim();
    let norm = m.frobenius_norm();
    let (diag, vecs) = if m.is_real() {
        let a: Vec<T> = m.entries().iter().map(|z| z.re).collect();
        let (d, v) = jacobi_real(a, n, norm)?;
        (d, v.into_iter().map(Cplx::real).collect::<Vec<_>>())
    } else {
        // symmetrize so the working copy is exactly Hermitian
        let a: Vec<Cplx<T>> = (0..n * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                let z = m[(i, j)] + m[(j, i)].conj();
                z.scale(T::one().mul_pow2(-1))
            })
            .collect();
        jacobi_complex(a, n, norm)?
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        diag[x]
            .partial_cmp(&diag[y])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.cmp(&y))
    });
    let eigenvalues = order.iter().map(|&k| diag[k]).collect();
    let eigenvectors = DenseOperator::from_fn(n, |i, j| vecs[i * n + order[j]]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Rotation parameters `(t, c, s)` annihilating an off-diagonal entry of
/// magnitude `g` (signed in the real case) between diagonals `app`, `aqq`.
#[inline]
fn rotation<T: Real>(app: T, aqq: T, g: T) -> (T, T, T) {
    let theta = (aqq - app) / (g + g);
    let t = theta.signum_or_one() / (theta.abs() + theta.hypot(T::one()));
    let c = T::one() / (T::one() + t * t).sqrt();
    (t, c, t * c)
}

#[inline]
fn negligible<T: Real>(g: T, app: T, aqq: T, rel: T, floor: T) -> bool {
    g <= floor || g <= rel * (app * aqq).abs().sqrt()
}

fn jacobi_real<T: Real>(mut a: Vec<T>, n: usize, norm: T) -> Result<(Vec<T>, Vec<T>)> {
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    let rel = T::tol(2);
    let floor = T::epsilon() * T::epsilon() * norm;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let (app, aqq) = (a[p * n + p], a[q * n + q]);
                if negligible(apq.abs(), app, aqq, rel, floor) {
                    a[p * n + q] = T::zero();
                    a[q * n + p] = T::zero();
                    continue;
                }
                rotated = true;
                let (t, c, s) = rotation(app, aqq, apq);
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    let np = c * arp - s * arq;
                    let nq = s * arp + c * arq;
                    a[r * n + p] = np;
                    a[p * n + r] = np;
                    a[r * n + q] = nq;
                    a[q * n + r] = nq;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = T::zero();
                a[q * n + p] = T::zero();
                for r in 0..n {
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = c * vrp - s * vrq;
                    v[r * n + q] = s * vrp + c * vrq;
                }
            }
        }
        if !rotated {
            return Ok(((0..n).map(|i| a[i * n + i]).collect(), v));
        }
    }
    Err(Error::Numerical(format!(
        "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps (dim {n}, P = {})",
        T::BITS
    )))
}

type ComplexDecomposition<T> = (Vec<T>, Vec<Cplx<T>>);

fn jacobi_complex<T: Real>(
    mut a: Vec<Cplx<T>>,
    n: usize,
    norm: T,
) -> Result<ComplexDecomposition<T>> {
    let mut v = vec![Cplx::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = Cplx::one();
        a[i * n + i].im = T::zero();
    }
    let rel = T::tol(2);
    let floor = T::epsilon() * T::epsilon() * norm;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let g = apq.abs();
                let (app, aqq) = (a[p * n + p].re, a[q * n + q].re);
                if negligible(g, app, aqq, rel, floor) {
                    a[p * n + q] = Cplx::zero();
                    a[q * n + p] = Cplx::zero();
                    continue;
                }
                rotated = true;
                // a_pq = g u with |u| = 1; rescaling column q by conj(u) makes it real
                let u_conj = Cplx::new(apq.re / g, -apq.im / g);
                let (t, c, s) = rotation(app, aqq, g);
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q] * u_conj;
                    let np = arp.scale(c) - arq.scale(s);
                    let nq = arp.scale(s) + arq.scale(c);
                    a[r * n + p] = np;
                    a[p * n + r] = np.conj();
                    a[r * n + q] = nq;
                    a[q * n + r] = nq.conj();
                }
                a[p * n + p] = Cplx::real(app - t * g);
                a[q * n + q] = Cplx::real(aqq + t * g);
                a[p * n + q] = Cplx::zero();
                a[q * n + p] = Cplx::zero();
                for r in 0..n {
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q] * u_conj;
                    v[r * n + p] = vrp.scale(c) - vrq.scale(s);
                    v[r * n + q] = vrp.scale(s) + vrq.scale(c);
                }
            }
        }
        if !rotated {
            return Ok(((0..n).map(|i| a[i * n + i].re).collect(), v));
        }
    }
    Err(Error::Numerical(format!(
        "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps (dim {n}, P = {})",
        T::BITS
    )))
}
