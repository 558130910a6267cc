//! XXZ chains with optional fields and their split into system, bath and coupling.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::linalg::DenseOperator;
use crate::pauli::{Axis, PauliString};
use crate::scalar::{Cplx, Real};

/// Name and version of the disorder generator, echoed into run metadata.
pub const DISORDER_RNG: &str = "rand_chacha-0.9 ChaCha20Rng::seed_from_u64";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coefficient: f64,
    pub string: PauliString,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldMode {
    Uniform { hx: f64, hz: f64 },
    /// `h^x_j` uniform in `[-hx, hx]` and `h^z_j` uniform in `[-hz, hz]`, drawn
    /// site by site (x first) from a seeded generator.
    Disordered { hx: f64, hz: f64, seed: u64 },
}

impl FieldMode {
    pub fn none() -> Self {
        FieldMode::Uniform { hx: 0.0, hz: 0.0 }
    }
}

/// Parameters a [`ModelSpec`] was built from; `fields[j-1] = (h^x_j, h^z_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub j: f64,
    pub delta: f64,
    pub field_mode: FieldMode,
    pub fields: Vec<(f64, f64)>,
}

/// A Hamiltonian as a list of real-weighted Pauli strings on `n_sites` sites.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub n_sites: usize,
    pub terms: Vec<Term>,
    pub params: Option<ModelParams>,
}

fn uniform_unit(rng: &mut ChaCha20Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// The open XXZ chain
/// `J sum (X_j X_j+1 + Y_j Y_j+1) + Delta sum Z_j Z_j+1 + sum (h^z_j Z_j + h^x_j X_j)`.
///
/// Bond terms are always present (three per bond); field terms only where
/// the field is non-zero.
pub fn build_xxz(l: usize, j: f64, delta: f64, field_mode: FieldMode) -> Result<ModelSpec> {
    if l < 2 {
        return Err(Error::Usage(format!("chain length must be at least 2, got {l}")));
    }
    let fields: Vec<(f64, f64)> = match field_mode {
        FieldMode::Uniform { hx, hz } => vec![(hx, hz); l],
        FieldMode::Disordered { hx, hz, seed } => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            (0..l)
                .map(|_| {
                    let x = hx * (2.0 * uniform_unit(&mut rng) - 1.0);
                    let z = hz * (2.0 * uniform_unit(&mut rng) - 1.0);
                    (x, z)
                })
                .collect()
        }
    };
    let mut terms = Vec::with_capacity(3 * (l - 1) + 2 * l);
    for site in 1..l {
        for (axis, c) in [(Axis::X, j), (Axis::Y, j), (Axis::Z, delta)] {
            terms.push(Term {
                coefficient: c,
                string: PauliString::new(l, &[(site, axis), (site + 1, axis)])?,
            });
        }
    }
    for (site, &(hx, hz)) in (1..=l).zip(&fields) {
        for (axis, c) in [(Axis::X, hx), (Axis::Z, hz)] {
            if c != 0.0 {
                terms.push(Term {
                    coefficient: c,
                    string: PauliString::single(l, site, axis)?,
                });
            }
        }
    }
    Ok(ModelSpec {
        n_sites: l,
        terms,
        params: Some(ModelParams {
            j,
            delta,
            field_mode,
            fields,
        }),
    })
}

impl ModelSpec {
    pub fn from_terms(n_sites: usize, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            if t.string.chain_length() != n_sites {
                return Err(Error::Usage(format!(
                    "term {} lives on {} sites, model has {n_sites}",
                    t.string,
                    t.string.chain_length()
                )));
            }
        }
        Ok(ModelSpec {
            n_sites,
            terms,
            params: None,
        })
    }

    /// Strings of the terms with non-zero coefficient, in term order.
    pub fn active_strings(&self) -> Vec<PauliString> {
        self.terms
            .iter()
            .filter(|t| t.coefficient != 0.0)
            .map(|t| t.string)
            .collect()
    }

    /// `sqrt(sum c^2)` over terms, equal to the normalized Frobenius norm
    /// when the strings are distinct.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient * t.coefficient).sum::<f64>().sqrt()
    }

    /// Same operator on a chain of a different length (the support must fit).
    pub fn restricted_to(&self, n_sites: usize) -> Result<ModelSpec> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok(Term {
                    coefficient: t.coefficient,
                    string: t.string.with_chain_length(n_sites)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ModelSpec {
            n_sites,
            terms,
            params: self.params.clone(),
        })
    }

    /// Dense matrix on `2^n_sites` dimensions.
    pub fn dense<T: Real>(&self) -> DenseOperator<T> {
        dense_from_terms(self.n_sites, &self.terms)
    }
}

pub(crate) fn dense_from_terms<T: Real>(n: usize, terms: &[Term]) -> DenseOperator<T> {
    let dim = 1usize << n;
    let mut m = DenseOperator::zeros(dim);
    for t in terms {
        if t.coefficient == 0.0 {
            continue;
        }
        let (ix, iz) = crate::pauli::matrix_masks(&t.string, n);
        let c = T::from_f64(t.coefficient);
        let y = t.string.y_count() % 4;
        for b in 0..dim {
            let negative = (b & iz).count_ones() % 2 == 1;
            // i^y (-1)^negative, times c
            let v = match (y + 2 * negative as u32) % 4 {
                0 => Cplx::real(c),
                1 => Cplx::new(T::zero(), c),
                2 => Cplx::real(-c),
                _ => Cplx::new(T::zero(), -c),
            };
            m[(b ^ ix, b)] += v;
        }
    }
    m
}

/// `H = H_A + H_B + H_AB` with the crossing terms scaled by `j_ab_scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bipartition {
    pub l_a: usize,
    pub j_ab_scale: f64,
    /// The unscaled full Hamiltonian.
    pub full: ModelSpec,
    /// Terms supported on sites `1..=l_a`, as operators on `l_a` sites.
    pub h_a: ModelSpec,
    /// Terms supported on sites `l_a+1..=L`, as operators on the full chain.
    pub h_b: ModelSpec,
    /// Crossing terms times `j_ab_scale`, on the full chain; empty when the
    /// scale is zero.
    pub h_ab: ModelSpec,
}

pub fn bipartition(spec: &ModelSpec, l_a: usize, j_ab_scale: f64) -> Result<Bipartition> {
    let l = spec.n_sites;
    if l_a == 0 || l_a >= l {
        return Err(Error::Usage(format!(
            "bipartition point L_A = {l_a} must satisfy 1 <= L_A < L = {l}"
        )));
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut ab = Vec::new();
    for t in &spec.terms {
        let first = t.string.first_site().unwrap_or(1);
        let last = t.string.last_site().unwrap_or(1);
        if last <= l_a {
            a.push(Term {
                coefficient: t.coefficient,
                string: t.string.with_chain_length(l_a)?,
            });
        } else if first > l_a {
            b.push(*t);
        } else if j_ab_scale != 0.0 {
            ab.push(Term {
                coefficient: t.coefficient * j_ab_scale,
                string: t.string,
            });
        }
    }
    Ok(Bipartition {
        l_a,
        j_ab_scale,
        full: spec.clone(),
        h_a: ModelSpec::from_terms(l_a, a)?,
        h_b: ModelSpec::from_terms(l, b)?,
        h_ab: ModelSpec::from_terms(l, ab)?,
    })
}

impl Bipartition {
    pub fn n_sites(&self) -> usize {
        self.full.n_sites
    }

    /// Terms of the coupled Hamiltonian `H_A + H_B + J_AB H_AB` on the full chain.
    pub fn coupled_terms(&self) -> Vec<Term> {
        let l = self.n_sites();
        let mut out: Vec<Term> = self
            .h_a
            .terms
            .iter()
            .map(|t| Term {
                coefficient: t.coefficient,
                string: t.string.with_chain_length(l).expect("A fits in the chain"),
            })
            .collect();
        out.extend(self.h_b.terms.iter().copied());
        out.extend(self.h_ab.terms.iter().copied());
        out
    }

    /// The Hamiltonian whose thermal state is reduced: `H_A + H_B + H_AB`
    /// with the scaled coupling.
    pub fn coupled(&self) -> ModelSpec {
        ModelSpec {
            n_sites: self.n_sites(),
            terms: self.coupled_terms(),
            params: self.full.params.clone(),
        }
    }

    pub fn d_b(&self) -> usize {
        1 << (self.n_sites() - self.l_a)
    }
}
