//! The Hamiltonian of mean force and its low-temperature partner, the
//! entanglement Hamiltonian.
//!
//! `H*_A = -(1/beta) ln[tr_B e^{-beta H} / Z_B]`. The full Hamiltonian is
//! diagonalized once per bipartition; every temperature then costs one
//! weighted partial trace and one small eigendecomposition. Boltzmann weights
//! are shifted by the ground energy so nothing overflows at large beta.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, weighted_partial_trace_b, DenseOperator, SpectralDecomposition};
use crate::model::{Bipartition, ModelSpec, Term};
use crate::pauli::PauliString;
use crate::scalar::Real;
use crate::table::{CoefficientTable, TableKey};

/// Shift of the resolution floor `2^(-P + 30) max(1, ||H||)`.
pub const FLOOR_SHIFT: i32 = 30;

#[derive(Debug, Clone)]
pub struct HmfResult<T: Real> {
    pub beta: T,
    pub hmf: DenseOperator<T>,
    /// `ln Z - ln Z_B`
    pub log_zstar: T,
    pub ln_z: T,
    pub ln_z_b: T,
    /// Reduced thermal state `tr_B e^{-beta H} / Z`.
    pub rho_a: DenseOperator<T>,
    pub l: usize,
    pub l_a: usize,
    /// Normalized Frobenius norm of the coupled Hamiltonian.
    pub h_norm: T,
}

impl<T: Real> HmfResult<T> {
    /// `2^(-P + 30) max(1, ||H||)`
    pub fn floor(&self) -> T {
        T::tol(FLOOR_SHIFT) * self.h_norm.max(T::one())
    }

    /// `beta H* + ln Z* = -ln rho_A`
    pub fn rescaled(&self) -> DenseOperator<T> {
        self.hmf.scale(self.beta).add_identity(self.log_zstar)
    }
}

/// Cached spectral data for one bipartition.
pub struct HmfSolver<T: Real> {
    l: usize,
    l_a: usize,
    h_a: DenseOperator<T>,
    full: SpectralDecomposition<T>,
    bath: Vec<T>,
    h_norm: T,
}

/// Bath terms moved onto sites `1..=L - L_A`.
pub(crate) fn bath_on_own_sites(h_b: &ModelSpec, l_a: usize) -> Result<ModelSpec> {
    let n = h_b.n_sites - l_a;
    let terms = h_b
        .terms
        .iter()
        .map(|t| {
            let factors: Vec<_> = t
                .string
                .factors()
                .into_iter()
                .map(|(s, a)| (s - l_a, a))
                .collect();
            Ok(Term {
                coefficient: t.coefficient,
                string: PauliString::new(n, &factors)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ModelSpec::from_terms(n, terms)
}

/// `ln sum_k exp(-beta (e_k - e_min)) - beta e_min` for ascending `e`.
fn log_partition<T: Real>(e: &[T], beta: T) -> T {
    let e0 = e[0];
    let mut s = T::zero();
    for &x in e {
        s += (-(beta * (x - e0))).exp();
    }
    s.ln() - beta * e0
}

impl<T: Real> HmfSolver<T> {
    pub fn new(bip: &Bipartition) -> Result<Self> {
        let coupled = bip.coupled();
        let h = coupled.dense::<T>();
        let full = hermitian_eigen(&h)?;
        let bath_spec = bath_on_own_sites(&bip.h_b, bip.l_a)?;
        let bath = hermitian_eigen(&bath_spec.dense::<T>())?.eigenvalues;
        Ok(HmfSolver {
            l: bip.n_sites(),
            l_a: bip.l_a,
            h_a: bip.h_a.dense(),
            h_norm: h.normalized_norm(),
            full,
            bath,
        })
    }

    pub fn l_a(&self) -> usize {
        self.l_a
    }

    pub fn h_a(&self) -> &DenseOperator<T> {
        &self.h_a
    }

    pub fn h_norm(&self) -> T {
        self.h_norm
    }

    pub fn spectrum(&self) -> &SpectralDecomposition<T> {
        &self.full
    }

    pub fn compute(&self, beta: T) -> Result<HmfResult<T>> {
        if beta <= T::zero() {
            return Err(Error::Usage(format!(
                "beta must be positive, got {}; the beta = 0 value is the order-0 series term",
                beta.to_f64()
            )));
        }
        let e = &self.full.eigenvalues;
        let e0 = e[0];
        let w: Vec<T> = e.iter().map(|&x| (-(beta * (x - e0))).exp()).collect();
        let r = weighted_partial_trace_b(&self.full.eigenvectors, &w, self.l, self.l_a)?;
        let rs = hermitian_eigen(&r)?;
        let r_min = rs.eigenvalues[0];
        if r_min <= T::zero() {
            return Err(Error::Numerical(format!(
                "reduced Boltzmann operator lost positivity at beta = {} \
                 (smallest eigenvalue {:e}); raise the precision",
                beta.to_f64(),
                r_min.to_f64()
            )));
        }
        let ln_z = log_partition(e, beta);
        let ln_z_b = log_partition(&self.bath, beta);
        let inv_beta = T::one() / beta;
        let shift = e0 + ln_z_b * inv_beta;
        let hmf = rs.reconstruct(|x| -(x.ln() * inv_beta) + shift);
        let total = r.trace().re;
        let rho_a = r.scale(T::one() / total);
        Ok(HmfResult {
            beta,
            hmf,
            log_zstar: ln_z - ln_z_b,
            ln_z,
            ln_z_b,
            rho_a,
            l: self.l,
            l_a: self.l_a,
            h_norm: self.h_norm,
        })
    }

    /// `c(O)` of `H* - H_A` for each operator.
    pub fn deviation_table(&self, res: &HmfResult<T>, ops: &[PauliString]) -> Result<CoefficientTable> {
        deviation_table_dense(res, &self.h_a, ops)
    }

    /// Entanglement Hamiltonian of the ground-state subspace, reusing the
    /// cached spectrum. `gap_tol` defaults to `1e-10` times the spectral range,
    /// `eps` to `2^(-P/2)` when the reduced projector is rank deficient and
    /// to zero otherwise.
    pub fn entanglement(&self, gap_tol: Option<T>, eps: Option<T>) -> Result<EntanglementResult<T>> {
        entanglement_from_spectrum(&self.full, self.l, self.l_a, gap_tol, eps)
    }
}

pub fn compute_hmf<T: Real>(bip: &Bipartition, beta: T) -> Result<HmfResult<T>> {
    HmfSolver::new(bip)?.compute(beta)
}

pub fn deviation_table<T: Real>(
    res: &HmfResult<T>,
    h_a: &ModelSpec,
    ops: &[PauliString],
) -> Result<CoefficientTable> {
    deviation_table_dense(res, &h_a.dense(), ops)
}

fn deviation_table_dense<T: Real>(
    res: &HmfResult<T>,
    h_a: &DenseOperator<T>,
    ops: &[PauliString],
) -> Result<CoefficientTable> {
    let diff = &res.hmf - h_a;
    CoefficientTable::from_operator(
        TableKey::Beta(res.beta.to_f64()),
        &diff,
        res.l_a,
        ops,
        res.floor(),
    )
}

#[derive(Debug, Clone)]
pub struct EntanglementResult<T: Real> {
    pub ent_ham: DenseOperator<T>,
    pub gs_degeneracy: usize,
    pub reduced_rank: usize,
    pub regularization_eps: T,
    pub gap_tol: T,
    pub ground_energy: T,
    /// `tr_B(P_GS) / g`
    pub rho_gs: DenseOperator<T>,
}

pub fn entanglement_hamiltonian<T: Real>(
    spec: &ModelSpec,
    l_a: usize,
    gap_tol: Option<T>,
    eps: Option<T>,
) -> Result<EntanglementResult<T>> {
    let sd = hermitian_eigen(&spec.dense::<T>())?;
    entanglement_from_spectrum(&sd, spec.n_sites, l_a, gap_tol, eps)
}

fn entanglement_from_spectrum<T: Real>(
    sd: &SpectralDecomposition<T>,
    l: usize,
    l_a: usize,
    gap_tol: Option<T>,
    eps: Option<T>,
) -> Result<EntanglementResult<T>> {
    let e = &sd.eigenvalues;
    let (e_min, e_max) = (e[0], e[e.len() - 1]);
    let gap_tol = gap_tol.unwrap_or_else(|| T::from_f64(1e-10) * (e_max - e_min));
    if eps.is_some_and(|e| e < T::zero()) {
        return Err(Error::Usage("regularization eps must be non-negative".into()));
    }
    let g = e.iter().take_while(|&&x| x - e_min <= gap_tol).count();
    let w: Vec<T> = (0..e.len())
        .map(|k| if k < g { T::one() } else { T::zero() })
        .collect();
    let rho_gs = weighted_partial_trace_b(&sd.eigenvectors, &w, l, l_a)?
        .scale(T::one() / T::from_f64(g as f64));
    let rs = hermitian_eigen(&rho_gs)?;
    let dim = rho_gs.dim();
    let cut = T::from_f64(dim as f64) * T::tol(16);
    let rank = rs.eigenvalues.iter().filter(|&&x| x > cut).count();
    let eps = eps.unwrap_or_else(|| {
        if rank < dim {
            T::one().mul_pow2(-(T::BITS as i32) / 2)
        } else {
            T::zero()
        }
    });
    if eps.is_zero() && rank < dim {
        return Err(Error::Domain(format!(
            "reduced ground-state projector has rank {rank} < {dim}; \
             pass a positive regularization eps"
        )));
    }
    let ent_ham = rs.reconstruct(|x| -((x + eps).ln()));
    Ok(EntanglementResult {
        ent_ham,
        gs_degeneracy: g,
        reduced_rank: rank,
        regularization_eps: eps,
        gap_tol,
        ground_energy: e_min,
        rho_gs,
    })
}

/// `||(beta H* + ln Z*) - H^E||_F / 2^(L_A/2)`
pub fn rescaled_distance<T: Real>(res: &HmfResult<T>, ent: &EntanglementResult<T>) -> Result<T> {
    if res.hmf.dim() != ent.ent_ham.dim() {
        return Err(Error::Usage(format!(
            "HMF on {} dimensions compared with an entanglement Hamiltonian on {}",
            res.hmf.dim(),
            ent.ent_ham.dim()
        )));
    }
    Ok((&res.rescaled() - &ent.ent_ham).normalized_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{func_hermitian, SpectralFunction};
    use crate::model::{bipartition, build_xxz, FieldMode};
    use crate::pauli::{enumerate_pauli, Axis};
    use crate::scalar::Dd;

    fn fig4(l: usize, l_a: usize, scale: f64) -> Bipartition {
        let spec = build_xxz(l, 1.0, 0.95, FieldMode::Uniform { hx: 0.2, hz: 0.2 }).unwrap();
        bipartition(&spec, l_a, scale).unwrap()
    }

    #[test]
    fn decoupled_hmf_is_bare_hamiltonian() {
        let bip = fig4(5, 3, 0.0);
        let solver = HmfSolver::<Dd>::new(&bip).unwrap();
        for beta in [0.01, 1.0, 7.0] {
            let res = solver.compute(Dd::from_f64(beta)).unwrap();
            let err = (&res.hmf - solver.h_a()).frobenius_norm();
            // small eigenvalues of rho_A carry absolute, not relative, error
            let sd = hermitian_eigen(&res.rho_a).unwrap();
            let cond = *sd.eigenvalues.last().unwrap() / sd.eigenvalues[0];
            let tol = Dd::tol(24) * cond / res.beta;
            assert!(err <= tol, "beta {beta}: {err:?} > {tol:?}");
        }
    }

    #[test]
    fn tiny_beta_is_close_to_bare() {
        let bip = fig4(6, 4, 1.0);
        let res = compute_hmf::<Dd>(&bip, Dd::from_f64(1e-6)).unwrap();
        let h_a = bip.h_a.dense::<Dd>();
        let rel = (&res.hmf - &h_a).frobenius_norm() / h_a.frobenius_norm();
        assert!(rel.to_f64() <= 1e-5, "{rel:?}");
    }

    #[test]
    fn two_site_xx_is_maximally_mixed() {
        let spec = build_xxz(2, 1.0, 0.0, FieldMode::none()).unwrap();
        let bip = bipartition(&spec, 1, 1.0).unwrap();
        let res = compute_hmf::<Dd>(&bip, Dd::ONE).unwrap();
        let ops = enumerate_pauli(1, 1).unwrap();
        let table = deviation_table(&res, &bip.h_a, &ops).unwrap();
        assert!(table.entries.iter().all(|e| e.below_floor));
        // rho_A = I/2 and H* = -(2/beta) ln cosh(beta J) for the XX + YY pair
        let expect = -2.0 * 1.0f64.cosh().ln();
        assert!((res.hmf[(0, 0)].re.to_f64() - expect).abs() < 1e-15);
    }

    #[test]
    fn reconstruction_and_hermiticity() {
        let bip = fig4(5, 3, 1.0);
        let solver = HmfSolver::<Dd>::new(&bip).unwrap();
        for beta in [0.1, 1.0, 5.0] {
            let beta = Dd::from_f64(beta);
            let res = solver.compute(beta).unwrap();
            let norm = res.hmf.frobenius_norm();
            assert!(res.hmf.hermiticity_defect() <= Dd::tol(20) * norm);
            let e = func_hermitian(&res.hmf, SpectralFunction::ExpScaled(beta)).unwrap();
            let rho = e.scale(Dd::ONE / e.trace().re);
            assert!((&rho - &res.rho_a).frobenius_norm() <= Dd::tol(24));
            // exp(-(beta H* + ln Z*)) is already normalized
            let n = func_hermitian(&res.rescaled(), SpectralFunction::ExpScaled(Dd::ONE)).unwrap();
            assert!((n.trace().re - Dd::ONE).abs() <= Dd::tol(24));
        }
    }

    #[test]
    fn rejects_non_positive_beta() {
        let bip = fig4(3, 2, 1.0);
        assert!(matches!(compute_hmf::<f64>(&bip, 0.0), Err(Error::Usage(_))));
        assert!(matches!(compute_hmf::<f64>(&bip, -1.0), Err(Error::Usage(_))));
    }

    #[test]
    fn xxz_selection_zeros() {
        let spec = build_xxz(5, 1.0, 0.95, FieldMode::none()).unwrap();
        let bip = bipartition(&spec, 3, 1.0).unwrap();
        let res = compute_hmf::<Dd>(&bip, Dd::from_f64(0.7)).unwrap();
        let z = PauliString::single(3, 2, Axis::Z).unwrap();
        let table = deviation_table(&res, &bip.h_a, &[z]).unwrap();
        assert!(table.entries[0].below_floor, "{:?}", table.entries[0]);
    }

    #[test]
    fn polarized_product_ground_state() {
        let l = 4;
        let terms = (1..=l)
            .map(|j| Term {
                coefficient: -0.5,
                string: PauliString::single(l, j, Axis::Z).unwrap(),
            })
            .collect();
        let spec = ModelSpec::from_terms(l, terms).unwrap();
        let ent = entanglement_hamiltonian::<Dd>(&spec, 2, None, None).unwrap();
        assert_eq!(ent.gs_degeneracy, 1);
        assert_eq!(ent.reduced_rank, 1);
        let sd = hermitian_eigen(&ent.ent_ham).unwrap();
        assert!(sd.eigenvalues[0].abs().to_f64() < 1e-15);
        for x in &sd.eigenvalues[1..] {
            assert!((x.to_f64() - 53.0 * 2f64.ln()).abs() < 1e-9);
        }
        assert!(matches!(
            entanglement_hamiltonian::<Dd>(&spec, 2, None, Some(Dd::ZERO)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn degenerate_ground_state_is_normalized() {
        // -Z1 Z2 - Z2 Z3: two ferromagnetic ground states
        let l = 3;
        let terms = (1..l)
            .map(|j| Term {
                coefficient: -1.0,
                string: PauliString::new(l, &[(j, Axis::Z), (j + 1, Axis::Z)]).unwrap(),
            })
            .collect();
        let spec = ModelSpec::from_terms(l, terms).unwrap();
        let ent = entanglement_hamiltonian::<Dd>(&spec, 1, None, None).unwrap();
        assert_eq!(ent.gs_degeneracy, 2);
        assert!((ent.rho_gs.trace().re - Dd::ONE).abs().to_f64() < 1e-30);
    }

    #[test]
    fn large_beta_approaches_entanglement_hamiltonian() {
        let bip = fig4(5, 2, 1.0);
        let solver = HmfSolver::<Dd>::new(&bip).unwrap();
        let ent = solver.entanglement(None, None).unwrap();
        let near = rescaled_distance(&solver.compute(Dd::from_f64(80.0)).unwrap(), &ent).unwrap();
        let far = rescaled_distance(&solver.compute(Dd::from_f64(1e-3)).unwrap(), &ent).unwrap();
        assert!(near.to_f64() < 1e-6, "{near:?}");
        assert!(far.to_f64() > 0.1, "{far:?}");
    }
}
