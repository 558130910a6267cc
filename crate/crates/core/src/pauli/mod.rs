//! Pauli strings on an open chain and their group algebra.
//!
//! A string is stored as two bit masks: bit `j - 1` of `x` (of `z`) is set when
//! site `j` carries an X or Y (a Z or Y) factor. Up to phase every string is
//! `X^x Z^z`, and `Y = i X Z` fixes the phase bookkeeping.

mod conjecture;
mod matrix;
mod rules;

pub use conjecture::{conjecture_k0, nonsplitting_products, tuple_splits, tuple_splits_exhaustive};
pub use matrix::{pauli_coefficient, to_matrix};
pub(crate) use matrix::index_masks as matrix_masks;
pub use rules::{minimal_product_length, sign_exclusion_witness, sign_excludes, SignAssignment};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// Longest chain a [`PauliString`] can describe.
pub const MAX_SITES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Axis::X => (true, false),
            Axis::Y => (true, true),
            Axis::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Option<Axis> {
        match (x, z) {
            (true, false) => Some(Axis::X),
            (true, true) => Some(Axis::Y),
            (false, true) => Some(Axis::Z),
            (false, false) => None,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Axis> {
        match c.to_ascii_uppercase() {
            'X' => Some(Axis::X),
            'Y' => Some(Axis::Y),
            'Z' => Some(Axis::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A Hermitian tensor product of single-site Pauli matrices on `chain_length` sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    chain_length: usize,
    x: u64,
    z: u64,
}

fn check_length(chain_length: usize) -> Result<()> {
    if chain_length > MAX_SITES {
        return Err(Error::Usage(format!(
            "chain length {chain_length} exceeds the supported maximum of {MAX_SITES} sites"
        )));
    }
    Ok(())
}

impl PauliString {
    pub fn identity(chain_length: usize) -> Result<Self> {
        check_length(chain_length)?;
        Ok(PauliString {
            chain_length,
            x: 0,
            z: 0,
        })
    }

    /// Builds a string from `(site, axis)` factors; sites are 1-based and must
    /// be strictly increasing.
    pub fn new(chain_length: usize, factors: &[(usize, Axis)]) -> Result<Self> {
        let mut s = Self::identity(chain_length)?;
        let mut last = 0;
        for &(site, axis) in factors {
            if site <= last {
                return Err(Error::Usage(format!(
                    "site indices must be strictly increasing, got {site} after {last}"
                )));
            }
            if site > chain_length {
                return Err(Error::Usage(format!(
                    "site {site} lies outside a chain of {chain_length} sites"
                )));
            }
            let (bx, bz) = axis.bits();
            let bit = 1u64 << (site - 1);
            if bx {
                s.x |= bit;
            }
            if bz {
                s.z |= bit;
            }
            last = site;
        }
        Ok(s)
    }

    pub fn single(chain_length: usize, site: usize, axis: Axis) -> Result<Self> {
        Self::new(chain_length, &[(site, axis)])
    }

    /// Parses compact text such as `"X1 Z3"` or `"I"`.
    pub fn parse(text: &str, chain_length: usize) -> Result<Self> {
        let text = text.trim();
        if text == "I" || text.is_empty() {
            return Self::identity(chain_length);
        }
        let mut factors = Vec::new();
        for tok in text.split_whitespace() {
            let mut chars = tok.chars();
            let axis = chars
                .next()
                .and_then(Axis::from_letter)
                .ok_or_else(|| Error::Parse(format!("bad Pauli factor {tok:?} in {text:?}")))?;
            let site: usize = chars
                .as_str()
                .parse()
                .map_err(|_| Error::Parse(format!("bad site index in {tok:?} of {text:?}")))?;
            factors.push((site, axis));
        }
        factors.sort_by_key(|&(s, _)| s);
        Self::new(chain_length, &factors).map_err(|e| match e {
            Error::Usage(m) => Error::Parse(format!("{text:?}: {m}")),
            other => other,
        })
    }

    pub(crate) fn from_masks(chain_length: usize, x: u64, z: u64) -> Self {
        debug_assert!(chain_length <= MAX_SITES);
        debug_assert!((x | z) >> chain_length == 0);
        PauliString { chain_length, x, z }
    }

    pub fn chain_length(&self) -> usize {
        self.chain_length
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn support_mask(&self) -> u64 {
        self.x | self.z
    }

    pub fn is_identity(&self) -> bool {
        self.support_mask() == 0
    }

    /// Number of non-identity factors.
    pub fn n_body(&self) -> usize {
        self.support_mask().count_ones() as usize
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Smallest site in the support.
    pub fn first_site(&self) -> Option<usize> {
        let s = self.support_mask();
        (s != 0).then(|| s.trailing_zeros() as usize + 1)
    }

    /// Largest site in the support.
    pub fn last_site(&self) -> Option<usize> {
        let s = self.support_mask();
        (s != 0).then(|| 64 - s.leading_zeros() as usize)
    }

    pub fn axis_at(&self, site: usize) -> Option<Axis> {
        if site == 0 || site > self.chain_length {
            return None;
        }
        let bit = 1u64 << (site - 1);
        Axis::from_bits(self.x & bit != 0, self.z & bit != 0)
    }

    pub fn factors(&self) -> Vec<(usize, Axis)> {
        (1..=self.chain_length)
            .filter_map(|s| self.axis_at(s).map(|a| (s, a)))
            .collect()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) & 1 == 0
    }

    /// True when no factor sits beyond site `l_a`.
    pub fn supported_within(&self, l_a: usize) -> bool {
        self.last_site().is_none_or(|s| s <= l_a)
    }

    /// The same operator viewed on a chain of a different length.
    pub fn with_chain_length(&self, chain_length: usize) -> Result<Self> {
        check_length(chain_length)?;
        if !self.supported_within(chain_length) {
            return Err(Error::Usage(format!(
                "{self} does not fit on a chain of {chain_length} sites"
            )));
        }
        Ok(PauliString {
            chain_length,
            ..*self
        })
    }

    /// Dense key `x | z << n` in `0..4^n`, used for bitset searches.
    pub(crate) fn index(&self) -> usize {
        (self.x | (self.z << self.chain_length)) as usize
    }

    #[cfg(test)]
    pub(crate) fn from_index(chain_length: usize, idx: usize) -> Self {
        let mask = (1u64 << chain_length) - 1;
        let idx = idx as u64;
        PauliString::from_masks(chain_length, idx & mask, idx >> chain_length)
    }

    /// Product up to phase.
    pub(crate) fn mul_unphased(&self, other: &PauliString) -> PauliString {
        PauliString {
            chain_length: self.chain_length,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let parts: Vec<String> = self
            .factors()
            .into_iter()
            .map(|(s, a)| format!("{a}{s}"))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A fourth root of unity `i^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u32) -> Phase {
        Phase((k % 4) as u8)
    }

    pub fn power(self) -> u32 {
        self.0 as u32
    }

    pub fn to_complex<T: Real>(self) -> Cplx<T> {
        match self.0 {
            0 => Cplx::one(),
            1 => Cplx::i(),
            2 => -Cplx::one(),
            _ => -Cplx::i(),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+1", "+i", "-1", "-i"][self.0 as usize])
    }
}

/// An element of the Pauli group: phase times Hermitian string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhasedPauli {
    pub phase: Phase,
    pub string: PauliString,
}

impl From<PauliString> for PhasedPauli {
    fn from(string: PauliString) -> Self {
        PhasedPauli {
            phase: Phase::ONE,
            string,
        }
    }
}

impl fmt::Display for PhasedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.phase, self.string)
    }
}

/// Pauli group product with exact phase.
pub fn multiply(a: &PhasedPauli, b: &PhasedPauli) -> Result<PhasedPauli> {
    let (sa, sb) = (&a.string, &b.string);
    if sa.chain_length != sb.chain_length {
        return Err(Error::Usage(format!(
            "cannot multiply strings on chains of {} and {} sites",
            sa.chain_length, sb.chain_length
        )));
    }
    let r = sa.mul_unphased(sb);
    // (i^ya X^xa Z^za)(i^yb X^xb Z^zb) = i^(ya+yb) (-1)^|za & xb| X^x Z^z, and X^x Z^z = i^-yr r
    let swap = 2 * (sa.z & sb.x).count_ones();
    let k = sa.y_count() + sb.y_count() + swap + 4 * MAX_SITES as u32 - r.y_count();
    Ok(PhasedPauli {
        phase: a.phase * b.phase * Phase::from_power(k),
        string: r,
    })
}

/// `L_A - i_1` for an operator supported in the first `l_a` sites.
pub fn distance(o: &PauliString, l_a: usize) -> Result<usize> {
    let first = o
        .first_site()
        .ok_or_else(|| Error::Usage("distance is undefined for the identity".into()))?;
    if !o.supported_within(l_a) {
        return Err(Error::Usage(format!(
            "{o} has support outside the subsystem of {l_a} sites"
        )));
    }
    Ok(l_a - first)
}

/// All `n`-body strings on sites `1..=l_a`: site sets in lexicographic order,
/// axes in X < Y < Z order within each set.
pub fn enumerate_pauli(l_a: usize, n: usize) -> Result<Vec<PauliString>> {
    check_length(l_a)?;
    if n == 0 || n > l_a {
        return Err(Error::Usage(format!(
            "body count {n} must lie in 1..={l_a}"
        )));
    }
    let mut out = Vec::new();
    let mut sites = Vec::with_capacity(n);
    fn rec(start: usize, l_a: usize, n: usize, sites: &mut Vec<usize>, out: &mut Vec<PauliString>) {
        if sites.len() == n {
            let combos = 3usize.pow(n as u32);
            for c in 0..combos {
                let mut factors = Vec::with_capacity(n);
                let mut code = c;
                for k in (0..n).rev() {
                    factors.push((sites[n - 1 - k], Axis::ALL[(code / 3usize.pow(k as u32)) % 3]));
                    code %= 3usize.pow(k as u32);
                }
                out.push(PauliString::new(l_a, &factors).expect("valid by construction"));
            }
            return;
        }
        for s in start..=l_a {
            sites.push(s);
            rec(s + 1, l_a, n, sites, out);
            sites.pop();
        }
    }
    rec(1, l_a, n, &mut sites, &mut out);
    Ok(out)
}

/// Every non-identity string on `l_a` sites, ordered by body count then as in
/// [`enumerate_pauli`].
pub fn enumerate_all(l_a: usize) -> Result<Vec<PauliString>> {
    let mut out = Vec::new();
    for n in 1..=l_a {
        out.extend(enumerate_pauli(l_a, n)?);
    }
    Ok(out)
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Axis> {
        let mut chars = s.trim().chars();
        match (chars.next().and_then(Axis::from_letter), chars.next()) {
            (Some(a), None) => Ok(a),
            _ => Err(Error::Parse(format!("unknown axis {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str, l: usize) -> PauliString {
        PauliString::parse(text, l).unwrap()
    }

    fn mul(a: &str, b: &str, l: usize) -> PhasedPauli {
        multiply(&p(a, l).into(), &p(b, l).into()).unwrap()
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(mul("X1", "Y1", 1), PhasedPauli { phase: Phase::I, string: p("Z1", 1) });
        assert_eq!(mul("I", "X1 Z2", 2), p("X1 Z2", 2).into());
        assert_eq!(mul("X1 X2", "X2 X3", 3), p("X1 X3", 3).into());
        assert_eq!(mul("Y1", "X1", 1).phase, Phase::MINUS_I);
        assert_eq!(mul("Z1", "X1", 1).phase, Phase::I);
        assert!(multiply(&p("X1", 1).into(), &p("X1", 2).into()).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&p("X6", 6), 6).unwrap(), 0);
        assert_eq!(distance(&p("X1", 6), 6).unwrap(), 5);
        assert_eq!(distance(&p("Z3 Z5", 6), 6).unwrap(), 3);
        assert!(distance(&p("I", 6), 6).is_err());
        assert!(distance(&p("X7", 7), 6).is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_pauli(2, 1).unwrap().len(), 6);
        assert_eq!(enumerate_pauli(4, 2).unwrap().len(), 54);
        for l in 1..=5 {
            assert_eq!(enumerate_all(l).unwrap().len(), 4usize.pow(l as u32) - 1);
        }
        let two = enumerate_pauli(2, 2).unwrap();
        assert_eq!(two[0].to_string(), "X1 X2");
        assert_eq!(two[1].to_string(), "X1 Y2");
        assert_eq!(two[3].to_string(), "Y1 X2");
    }

    #[test]
    fn text_roundtrip() {
        for s in ["I", "X1", "Z3 Z5", "X1 Y2 Z7"] {
            assert_eq!(p(s, 7).to_string(), s);
        }
        assert_eq!(p("Z5 Z3", 6).to_string(), "Z3 Z5");
        assert!(PauliString::parse("Q1", 3).is_err());
        assert!(PauliString::parse("X4", 3).is_err());
        assert!(PauliString::parse("X1 Y1", 3).is_err());
    }

    #[test]
    fn index_roundtrip() {
        for o in enumerate_all(3).unwrap() {
            assert_eq!(PauliString::from_index(3, o.index()), o);
        }
    }
}
