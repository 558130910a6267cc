//! Partial traces over the trailing sites.
//!
//! Site 1 is the most significant qubit, so for a split after `l_a` sites the
//! full index factorizes as `a * D_B + b`.

use super::DenseOperator;
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

fn split_dims(dim: usize, l: usize, l_a: usize) -> Result<(usize, usize)> {
    if l >= usize::BITS as usize || dim != 1usize << l {
        return Err(Error::Usage(format!(
            "operator dimension {dim} does not match a chain of {l} sites"
        )));
    }
    if l_a == 0 || l_a >= l {
        return Err(Error::Usage(format!(
            "subsystem size L_A = {l_a} must satisfy 1 <= L_A < L = {l}"
        )));
    }
    Ok((1 << l_a, 1 << (l - l_a)))
}

/// `tr_B M` for `M` on `2^l` dimensions, keeping the first `l_a` sites.
pub fn partial_trace_b<T: Real>(
    m: &DenseOperator<T>,
    l: usize,
    l_a: usize,
) -> Result<DenseOperator<T>> {
    let (da, db) = split_dims(m.dim(), l, l_a)?;
    Ok(DenseOperator::from_fn(da, |a1, a2| {
        let mut acc = Cplx::zero();
        for b in 0..db {
            acc += m[(a1 * db + b, a2 * db + b)];
        }
        acc
    }))
}

/// `tr_B (V diag(w) V^dagger)` without forming the full matrix. Zero weights
/// are skipped, which matters at large beta where most Boltzmann factors underflow.
pub fn weighted_partial_trace_b<T: Real>(
    v: &DenseOperator<T>,
    w: &[T],
    l: usize,
    l_a: usize,
) -> Result<DenseOperator<T>> {
    let n = v.dim();
    let (da, db) = split_dims(n, l, l_a)?;
    if w.len() != n {
        return Err(Error::Usage(format!(
            "{} weights supplied for dimension {n}",
            w.len()
        )));
    }
    let active: Vec<usize> = (0..n).filter(|&k| !w[k].is_zero()).collect();
    let mut out = DenseOperator::zeros(da);
    if v.is_real() {
        let vr: Vec<T> = v.entries().iter().map(|z| z.re).collect();
        for a1 in 0..da {
            for a2 in a1..da {
                let mut acc = T::zero();
                for &k in &active {
                    let mut s = T::zero();
                    for b in 0..db {
                        s += vr[(a1 * db + b) * n + k] * vr[(a2 * db + b) * n + k];
                    }
                    acc += w[k] * s;
                }
                out[(a1, a2)] = Cplx::real(acc);
                out[(a2, a1)] = Cplx::real(acc);
            }
        }
        return Ok(out);
    }
    for a1 in 0..da {
        for a2 in a1..da {
            let mut acc = Cplx::zero();
            for &k in &active {
                let mut s = Cplx::zero();
                for b in 0..db {
                    s += v[(a1 * db + b, k)] * v[(a2 * db + b, k)].conj();
                }
                acc += s.scale(w[k]);
            }
            if a1 == a2 {
                acc.im = T::zero();
            }
            out[(a1, a2)] = acc;
            out[(a2, a1)] = acc.conj();
        }
    }
    Ok(out)
}
