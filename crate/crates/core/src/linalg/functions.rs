use super::{hermitian_eigen, DenseOperator};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A scalar function lifted to Hermitian matrices through the spectral basis.
#[derive(Clone, Copy, Debug)]
pub enum SpectralFunction<T> {
    /// `M -> exp(-beta M)`
    ExpScaled(T),
    /// Natural logarithm; requires a positive-definite argument.
    Log,
}

pub fn func_hermitian<T: Real>(
    m: &DenseOperator<T>,
    f: SpectralFunction<T>,
) -> Result<DenseOperator<T>> {
    let sd = hermitian_eigen(m)?;
    match f {
        SpectralFunction::ExpScaled(beta) => Ok(sd.reconstruct(|x| (-(beta * x)).exp())),
        SpectralFunction::Log => {
            let lmin = sd.eigenvalues.first().copied().unwrap_or_else(T::one);
            let cut = T::from_f64(m.dim() as f64) * T::tol(16) * m.frobenius_norm();
            if lmin <= cut {
                return Err(Error::Domain(format!(
                    "matrix logarithm needs a positive-definite argument; \
                     smallest eigenvalue is {:e} (threshold {:e})",
                    lmin.to_f64(),
                    cut.to_f64()
                )));
            }
            Ok(sd.reconstruct(T::ln))
        }
    }
}
