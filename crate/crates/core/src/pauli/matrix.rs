//! Dense realizations of Pauli strings and Hilbert-Schmidt coefficients.
//!
//! Basis index `b = sum_j bit_j 2^(n-j)`: site 1 is the most significant qubit.
//! In that basis `O |b> = i^#Y (-1)^|b & z| |b ^ x>`.

use super::PauliString;
use crate::error::{Error, Result};
use crate::linalg::DenseOperator;
use crate::scalar::{Cplx, Real};

/// Site masks converted to basis-index masks for an `n`-site register.
pub(crate) fn index_masks(o: &PauliString, n: usize) -> (usize, usize) {
    let mut ix = 0usize;
    let mut iz = 0usize;
    for site in 1..=n {
        let bit = 1u64 << (site - 1);
        let target = 1usize << (n - site);
        if o.x_mask() & bit != 0 {
            ix |= target;
        }
        if o.z_mask() & bit != 0 {
            iz |= target;
        }
    }
    (ix, iz)
}

fn register_sites(dim: usize) -> Result<usize> {
    if !dim.is_power_of_two() {
        return Err(Error::Usage(format!("dimension {dim} is not a power of two")));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Matrix of `o` on `n_sites` qubits.
pub fn to_matrix<T: Real>(o: &PauliString, n_sites: usize) -> Result<DenseOperator<T>> {
    if !o.supported_within(n_sites) {
        return Err(Error::Usage(format!(
            "{o} has support outside a register of {n_sites} sites"
        )));
    }
    let dim = 1usize << n_sites;
    let (ix, iz) = index_masks(o, n_sites);
    let base = super::Phase::from_power(o.y_count());
    let mut m = DenseOperator::zeros(dim);
    for b in 0..dim {
        let mut ph = base;
        if (b & iz).count_ones() % 2 == 1 {
            ph = ph * super::Phase::MINUS_ONE;
        }
        m[(b ^ ix, b)] = ph.to_complex();
    }
    Ok(m)
}

/// `tr(O X) / dim`: the coefficient of `O` in the Pauli expansion of Hermitian `X`.
pub fn pauli_coefficient<T: Real>(x: &DenseOperator<T>, o: &PauliString) -> Result<T> {
    let n = register_sites(x.dim())?;
    if !o.supported_within(n) {
        return Err(Error::Usage(format!(
            "{o} has support outside a register of {n} sites"
        )));
    }
    let defect = x.hermiticity_defect();
    let bound = T::tol(20) * x.frobenius_norm().max(T::one());
    if defect > bound {
        return Err(Error::Numerical(format!(
            "coefficient of {o} requested from a non-Hermitian matrix \
             (||X - X^dagger||_F = {:e})",
            defect.to_f64()
        )));
    }
    let (ix, iz) = index_masks(o, n);
    // tr(O X) = sum_c <c^x| O |c> X[c, c^x]
    let mut acc = Cplx::<T>::zero();
    for c in 0..x.dim() {
        let v = x[(c, c ^ ix)];
        if (c & iz).count_ones() % 2 == 1 {
            acc -= v;
        } else {
            acc += v;
        }
    }
    let acc = acc * super::Phase::from_power(o.y_count()).to_complex();
    Ok(acc.re / T::from_f64(x.dim() as f64))
}
