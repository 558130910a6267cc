//! Selection rules: sign homomorphisms and shortest factorizations.

use std::collections::HashSet;
use std::fmt;

use super::{Axis, PauliString};

/// A homomorphism from the single-site Klein group to {+1, -1}: `plus_axis`
/// maps to +1, the other two axes to -1, identity to +1. Extended
/// multiplicatively over sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignAssignment {
    pub plus_axis: Axis,
}

impl SignAssignment {
    pub const ALL: [SignAssignment; 3] = [
        SignAssignment { plus_axis: Axis::X },
        SignAssignment { plus_axis: Axis::Y },
        SignAssignment { plus_axis: Axis::Z },
    ];

    /// +1 or -1.
    pub fn sign(&self, o: &PauliString) -> i8 {
        let minus = o
            .factors()
            .iter()
            .filter(|&&(_, a)| a != self.plus_axis)
            .count();
        if minus % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for SignAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s({})=+1", self.plus_axis)
    }
}

/// A sign assignment under which every term is even and `o` is odd, if any.
/// Such a witness forces the coefficient of `o` to vanish at every temperature.
pub fn sign_exclusion_witness(terms: &[PauliString], o: &PauliString) -> Option<SignAssignment> {
    SignAssignment::ALL
        .into_iter()
        .find(|s| s.sign(o) == -1 && terms.iter().all(|t| s.sign(t) == 1))
}

pub fn sign_excludes(terms: &[PauliString], o: &PauliString) -> bool {
    sign_exclusion_witness(terms, o).is_some()
}

/// Smallest `t <= k_max` such that a product of exactly `t` terms (repetition
/// allowed) equals `o` up to phase.
pub fn minimal_product_length(
    terms: &[PauliString],
    o: &PauliString,
    k_max: usize,
) -> Option<usize> {
    let n = terms.first()?.chain_length();
    let target = o.with_chain_length(n).ok()?;
    let key = |p: &PauliString| (p.x_mask(), p.z_mask());
    let mut layer: HashSet<(u64, u64)> = HashSet::from([(0, 0)]);
    let mut before = HashSet::new();
    for t in 1..=k_max {
        let mut next = HashSet::with_capacity(layer.len() * 2);
        for &(x, z) in &layer {
            for h in terms {
                next.insert((x ^ h.x_mask(), z ^ h.z_mask()));
            }
        }
        if next.contains(&key(&target)) {
            return Some(t);
        }
        if next == before {
            // S_t = S_(t-2) makes the layers alternate forever
            return None;
        }
        before = std::mem::replace(&mut layer, next);
    }
    None
}
