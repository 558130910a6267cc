//! The splitting predicate on tuples of Hamiltonian terms and the order it
//! predicts for the first non-vanishing series coefficient.
//!
//! A tuple splits when it can be divided into a non-empty part with no support
//! beyond site `L_A` and a remainder, with every element of the first part
//! commuting with every element of the second.

use std::collections::BTreeSet;

use super::PauliString;
use crate::error::{Error, Result};

/// Bitset searches index the full Pauli group, `4^n` entries.
const MAX_SEARCH_SITES: usize = 10;

/// Splitting test via connected components of the anticommutation graph:
/// the first part must be a union of components, so the tuple splits exactly
/// when some component lies entirely inside the subsystem.
pub fn tuple_splits(tuple: &[PauliString], l_a: usize) -> bool {
    let m = tuple.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..m {
        for j in i + 1..m {
            if !tuple[i].commutes_with(&tuple[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut touches_b = vec![false; m];
    for (i, t) in tuple.iter().enumerate() {
        let root = find(&mut parent, i);
        if !t.supported_within(l_a) {
            touches_b[root] = true;
        }
    }
    (0..m).any(|i| find(&mut parent, i) == i && !touches_b[i])
}

/// The same predicate by brute force over all `2^m` subsets.
pub fn tuple_splits_exhaustive(tuple: &[PauliString], l_a: usize) -> bool {
    let m = tuple.len();
    assert!(m < 32, "exhaustive split search is limited to 31 elements");
    (1u32..(1 << m)).any(|first| {
        let inside = |i: usize| first >> i & 1 == 1;
        (0..m).all(|i| !inside(i) || tuple[i].supported_within(l_a))
            && (0..m).all(|i| {
                !inside(i) || (0..m).all(|j| inside(j) || tuple[i].commutes_with(&tuple[j]))
            })
    })
}

type Bitset = Vec<u64>;

fn bit(set: &Bitset, idx: usize) -> bool {
    set[idx >> 6] >> (idx & 63) & 1 == 1
}

fn set_bit(set: &mut Bitset, idx: usize) {
    set[idx >> 6] |= 1 << (idx & 63);
}

/// `reach[r][i]`: Pauli indices of products of exactly `r` terms drawn
/// (with repetition) from `terms[i..]`.
struct Reachability {
    reach: Vec<Vec<Bitset>>,
}

impl Reachability {
    fn new(terms: &[PauliString], n: usize, r_max: usize) -> Self {
        let size = 1usize << (2 * n);
        let words = size.div_ceil(64);
        let t = terms.len();
        let mut reach = vec![vec![vec![0u64; words]; t + 1]; r_max + 1];
        for row in reach[0].iter_mut() {
            set_bit(row, 0);
        }
        let idx: Vec<usize> = terms.iter().map(|h| h.index()).collect();
        for r in 1..=r_max {
            for i in (0..t).rev() {
                let mut cur = reach[r][i + 1].clone();
                let prev = &reach[r - 1][i];
                for (w, &word) in prev.iter().enumerate() {
                    let mut bits = word;
                    while bits != 0 {
                        let b = bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        set_bit(&mut cur, (w * 64 + b) ^ idx[i]);
                    }
                }
                reach[r][i] = cur;
            }
        }
        Reachability { reach }
    }

    fn can_reach(&self, r: usize, from: usize, idx: usize) -> bool {
        bit(&self.reach[r][from], idx)
    }
}

fn prepare(terms: &[PauliString], o: &PauliString) -> Result<(usize, PauliString)> {
    let n = terms
        .first()
        .map(|t| t.chain_length())
        .ok_or_else(|| Error::Usage("term list is empty".into()))?;
    if terms.iter().any(|t| t.chain_length() != n) {
        return Err(Error::Usage("terms live on chains of different lengths".into()));
    }
    if n > MAX_SEARCH_SITES {
        return Err(Error::Usage(format!(
            "tuple search supports at most {MAX_SEARCH_SITES} sites, got {n}"
        )));
    }
    Ok((n, o.with_chain_length(n)?))
}

/// Depth-first search for a multiset of `m` terms (indices nondecreasing)
/// whose product is `target` up to phase and which does not split.
fn find_nonsplitting(
    terms: &[PauliString],
    reach: &Reachability,
    target: usize,
    l_a: usize,
    m: usize,
) -> Option<Vec<usize>> {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        terms: &[PauliString],
        reach: &Reachability,
        target: usize,
        l_a: usize,
        start: usize,
        remaining: usize,
        product: usize,
        stack: &mut Vec<usize>,
        tuple: &mut Vec<PauliString>,
    ) -> bool {
        if remaining == 0 {
            return product == target && !tuple_splits(tuple, l_a);
        }
        for j in start..terms.len() {
            let next = product ^ terms[j].index();
            if !reach.can_reach(remaining - 1, j, next ^ target) {
                continue;
            }
            stack.push(j);
            tuple.push(terms[j]);
            if rec(terms, reach, target, l_a, j, remaining - 1, next, stack, tuple) {
                return true;
            }
            stack.pop();
            tuple.pop();
        }
        false
    }
    let mut stack = Vec::with_capacity(m);
    let mut tuple = Vec::with_capacity(m);
    if !reach.can_reach(m, 0, target) {
        return None;
    }
    rec(terms, reach, target, l_a, 0, m, 0, &mut stack, &mut tuple).then_some(stack)
}

/// Smallest `k` in `1..=k_max` for which some tuple of `k + 1` terms with
/// product proportional to `o` fails to split. `None` when every such tuple
/// splits up to `k_max`.
pub fn conjecture_k0(
    terms: &[PauliString],
    o: &PauliString,
    l_a: usize,
    k_max: usize,
) -> Result<Option<usize>> {
    let (n, target) = prepare(terms, o)?;
    let terms: Vec<PauliString> = terms.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let reach = Reachability::new(&terms, n, k_max + 1);
    for k in 1..=k_max {
        if find_nonsplitting(&terms, &reach, target.index(), l_a, k + 1).is_some() {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Every operator (up to phase) that is the product of some non-splitting
/// multiset of exactly `m` terms.
pub fn nonsplitting_products(
    terms: &[PauliString],
    l_a: usize,
    m: usize,
) -> Result<BTreeSet<PauliString>> {
    let (n, _) = prepare(terms, &PauliString::identity(0)?)?;
    let terms: Vec<PauliString> = terms.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let mut out = BTreeSet::new();
    let mut tuple: Vec<PauliString> = Vec::with_capacity(m);
    fn rec(
        terms: &[PauliString],
        l_a: usize,
        n: usize,
        start: usize,
        remaining: usize,
        tuple: &mut Vec<PauliString>,
        out: &mut BTreeSet<PauliString>,
    ) {
        if remaining == 0 {
            if !tuple_splits(tuple, l_a) {
                let p = tuple
                    .iter()
                    .fold(PauliString::from_masks(n, 0, 0), |acc, h| acc.mul_unphased(h));
                out.insert(p);
            }
            return;
        }
        for j in start..terms.len() {
            tuple.push(terms[j]);
            rec(terms, l_a, n, j, remaining - 1, tuple, out);
            tuple.pop();
        }
    }
    rec(&terms, l_a, n, 0, m, &mut tuple, &mut out);
    Ok(out)
}
