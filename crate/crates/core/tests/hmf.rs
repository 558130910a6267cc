use meanforce::analysis::Family;
use meanforce::linalg::{func_hermitian, hermitian_eigen, SpectralFunction};
use meanforce::model::{bipartition, build_xxz, Bipartition, FieldMode};
use meanforce::pauli::{enumerate_pauli, sign_excludes, Axis, PauliString};
use meanforce::perturbation::{k0_numeric, SeriesEngine};
use meanforce::{compute_hmf, deviation_table, rescaled_distance, Dd, HmfSolver, Real};
use proptest::prelude::*;

fn chain(l: usize, l_a: usize, delta: f64, h: f64) -> Bipartition {
    let mode = if h == 0.0 {
        FieldMode::none()
    } else {
        FieldMode::Uniform { hx: h, hz: h }
    };
    bipartition(&build_xxz(l, 1.0, delta, mode).unwrap(), l_a, 1.0).unwrap()
}

#[test]
fn decoupled_chain_gives_bare_hamiltonian() {
    let spec = build_xxz(6, 1.0, 0.95, FieldMode::Uniform { hx: 0.2, hz: 0.2 }).unwrap();
    let bip = bipartition(&spec, 4, 0.0).unwrap();
    assert!(bip.h_ab.terms.is_empty());
    let ops = enumerate_pauli(4, 2).unwrap();
    for beta in [0.1, 1.0, 3.0] {
        let res = compute_hmf::<Dd>(&bip, Dd::from_f64(beta)).unwrap();
        let t = deviation_table(&res, &bip.h_a, &ops).unwrap();
        assert!(t.entries.iter().all(|e| e.below_floor), "beta {beta}");
    }
}

#[test]
fn infinitesimal_beta_deviations_are_small() {
    let bip = chain(6, 4, 0.95, 0.2);
    let res = compute_hmf::<Dd>(&bip, Dd::from_f64(1e-6)).unwrap();
    let t = deviation_table(&res, &bip.h_a, &enumerate_pauli(4, 2).unwrap()).unwrap();
    assert!(t.max_abs() <= 1e-5, "{}", t.max_abs());
}

#[test]
fn xxz_single_z_vanishes() {
    let bip = chain(6, 4, 0.95, 0.0);
    let solver = HmfSolver::<Dd>::new(&bip).unwrap();
    let z3 = PauliString::single(4, 3, Axis::Z).unwrap();
    for beta in [0.05, 0.5, 4.0] {
        let res = solver.compute(Dd::from_f64(beta)).unwrap();
        let t = solver.deviation_table(&res, &[z3]).unwrap();
        assert!(t.entries[0].below_floor, "beta {beta}: {:?}", t.entries[0]);
    }
}

#[test]
fn small_beta_matches_leading_series_term() {
    let bip = chain(6, 4, 0.95, 0.2);
    let engine = SeriesEngine::<Dd>::new(&bip, 8).unwrap();
    let ops: Vec<_> = [
        Family::one_body(Axis::X),
        Family::one_body(Axis::Z),
        Family::pair(Axis::X, Axis::X),
        Family::pair(Axis::Z, Axis::Z),
    ]
    .iter()
    .flat_map(|f| f.members(4).unwrap())
    .collect();
    let tables = engine.tables(&ops).unwrap();
    let tol = meanforce::perturbation::default_tol(&engine.coefficients().unwrap()).to_f64();
    let beta = 1e-3;
    let res = compute_hmf::<Dd>(&bip, Dd::from_f64(beta)).unwrap();
    let t = deviation_table(&res, &bip.h_a, &ops).unwrap();
    let mut checked = 0;
    for o in &ops {
        let Some(k) = k0_numeric(&tables, o, tol) else { continue };
        let ck = tables[k].value(o).unwrap();
        let predicted = beta.powi(k as i32) * ck;
        let c = t.value(o).unwrap();
        if t.get(o).unwrap().below_floor {
            continue;
        }
        assert!((c - predicted).abs() <= 0.1 * predicted.abs(), "{o}: {c:e} vs {predicted:e}");
        checked += 1;
    }
    assert!(checked >= 8, "only {checked} operators checked");
}

#[test]
fn skin_monotonic_at_small_beta() {
    let bip = chain(7, 6, 0.95, 0.2);
    let solver = HmfSolver::<Dd>::new(&bip).unwrap();
    let families = [
        Family::one_body(Axis::X),
        Family::one_body(Axis::Z),
        Family::pair(Axis::X, Axis::X),
        Family::pair(Axis::Y, Axis::Y),
        Family::pair(Axis::Z, Axis::Z),
        Family::contiguous(&[Axis::Z, Axis::X, Axis::X]),
    ];
    for beta in [0.01, 0.1, 0.2] {
        let res = solver.compute(Dd::from_f64(beta)).unwrap();
        for f in &families {
            let members = f.members(6).unwrap();
            let t = solver.deviation_table(&res, &members).unwrap();
            let vals: Vec<f64> = members
                .iter()
                .map(|o| t.get(o).unwrap())
                .map(|e| if e.below_floor { 0.0 } else { e.value.abs() })
                .collect();
            // the boundary member may be smaller than its neighbour
            for w in vals[1..].windows(2) {
                assert!(w[1] <= w[0], "{} at beta {beta}: {vals:?}", f.name);
            }
        }
    }
}

#[test]
fn reaches_entanglement_hamiltonian() {
    let bip = chain(7, 3, 0.95, 0.2);
    let solver = HmfSolver::<Dd>::new(&bip).unwrap();
    let ent = solver.entanglement(None, None).unwrap();
    let d = |b: f64| rescaled_distance(&solver.compute(Dd::from_f64(b)).unwrap(), &ent).unwrap();
    assert!(d(100.0).to_f64() < 1e-6);
    assert!(d(1e-3).to_f64() > 1.0);
}

#[test]
fn rescaled_distance_ignores_identity_shifts() {
    let bip = chain(5, 2, 0.95, 0.2);
    let solver = HmfSolver::<Dd>::new(&bip).unwrap();
    let ent = solver.entanglement(None, None).unwrap();
    let res = solver.compute(Dd::from_f64(3.0)).unwrap();
    let base = rescaled_distance(&res, &ent).unwrap();
    // c I added to H* is routed through ln Z* as -beta c
    let c = Dd::from_f64(0.75);
    let mut shifted = res.clone();
    shifted.hmf = res.hmf.add_identity(c);
    shifted.log_zstar = res.log_zstar - res.beta * c;
    let moved = rescaled_distance(&shifted, &ent).unwrap();
    assert!((moved - base).abs() <= Dd::tol(30), "{base:?} {moved:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hmf_reconstructs_reduced_state(
        delta in 0.0f64..1.5,
        h in 0.0f64..1.0,
        l_a in 1usize..4,
        beta in 0.05f64..3.0,
    ) {
        let bip = chain(5, l_a, delta, h);
        let beta = Dd::from_f64(beta);
        let res = compute_hmf::<Dd>(&bip, beta).unwrap();
        prop_assert!(res.hmf.hermiticity_defect() <= Dd::tol(20) * res.hmf.frobenius_norm());
        let e = func_hermitian(&res.hmf, SpectralFunction::ExpScaled(beta)).unwrap();
        let rho = e.scale(Dd::ONE / e.trace().re);
        prop_assert!((&rho - &res.rho_a).frobenius_norm() <= Dd::tol(24));
    }

    #[test]
    fn selection_rules_hold_numerically(delta in 0.1f64..1.5, l_a in 2usize..5) {
        let bip = chain(6, l_a, delta, 0.0);
        let terms = bip.full.active_strings();
        let solver = HmfSolver::<Dd>::new(&bip).unwrap();
        let ops: Vec<_> = enumerate_pauli(l_a, 1)
            .unwrap()
            .into_iter()
            .chain(enumerate_pauli(l_a, 2).unwrap())
            .filter(|o| sign_excludes(&terms, &o.with_chain_length(6).unwrap()))
            .collect();
        for beta in [0.1, 0.5, 1.0, 2.0] {
            let res = solver.compute(Dd::from_f64(beta)).unwrap();
            let t = solver.deviation_table(&res, &ops).unwrap();
            let floor = Dd::tol(30).to_f64() * solver.h_norm().to_f64();
            prop_assert!(t.max_abs() <= floor, "beta {beta}: {} > {floor}", t.max_abs());
        }
    }

    #[test]
    fn entanglement_hamiltonian_reproduces_projector(delta in 0.2f64..1.5, h in 0.05f64..0.5) {
        let bip = chain(5, 2, delta, h);
        let solver = HmfSolver::<Dd>::new(&bip).unwrap();
        let ent = solver.entanglement(None, None).unwrap();
        let back = func_hermitian(&ent.ent_ham, SpectralFunction::ExpScaled(Dd::ONE)).unwrap();
        let target = ent.rho_gs.add_identity(ent.regularization_eps);
        prop_assert!((&back - &target).frobenius_norm() <= Dd::tol(24));
        let sd = hermitian_eigen(&ent.rho_gs).unwrap();
        prop_assert!(sd.eigenvalues.iter().all(|x| x.to_f64() > -1e-25));
    }
}
