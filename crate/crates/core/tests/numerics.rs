use meanforce::analysis::{fit_beta_exponent, fit_skin_depth, fit_skin_law, log_grid, Family};
use meanforce::linalg::{
    func_hermitian, hermitian_eigen, partial_trace_b, read_dump, write_dump, SpectralFunction,
};
use meanforce::model::{bipartition, build_xxz, FieldMode};
use meanforce::pauli::{distance, Axis};
use meanforce::{CoefficientEntry, CoefficientTable, Cplx, DenseOperator, Dd, Real, TableKey, F256};
use proptest::prelude::*;

fn hermitian_from(vals: &[(f64, f64)], dim: usize) -> DenseOperator<Dd> {
    let mut m = DenseOperator::<Dd>::zeros(dim);
    let mut it = vals.iter();
    for i in 0..dim {
        for j in i..dim {
            let &(re, im) = it.next().unwrap();
            let im = if i == j { 0.0 } else { im };
            m[(i, j)] = Cplx::new(Dd::from_f64(re), Dd::from_f64(im));
            m[(j, i)] = Cplx::new(Dd::from_f64(re), Dd::from_f64(-im));
        }
    }
    m
}

fn arb_hermitian(dim: usize) -> impl Strategy<Value = DenseOperator<Dd>> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * (dim + 1) / 2)
        .prop_map(move |v| hermitian_from(&v, dim))
}

fn table_of(values: &[(usize, f64)], family: &Family, l_a: usize) -> CoefficientTable {
    let members = family.members(l_a).unwrap();
    let entries = members
        .iter()
        .zip(values)
        .map(|(o, &(_, v))| CoefficientEntry {
            operator: *o,
            n_body: o.n_body(),
            distance: distance(o, l_a).unwrap(),
            value: v,
            below_floor: false,
        })
        .collect();
    CoefficientTable {
        key: TableKey::Beta(0.1),
        l_a,
        floor: 0.0,
        entries,
    }
}

#[test]
fn random_hermitian_64_meets_residual_contract() {
    let v: Vec<_> = (0..64 * 65 / 2)
        .map(|i| {
            let x = ((i * 7919) % 1000) as f64 / 500.0 - 1.0;
            (x, ((i * 104729) % 997) as f64 / 498.5 - 1.0)
        })
        .collect();
    let m = hermitian_from(&v, 64);
    let sd = hermitian_eigen(&m).unwrap();
    assert!(sd.residual(&m) <= Dd::ONE.mul_pow2(-90) * m.frobenius_norm());
}

#[test]
fn model_counts_and_reassembly() {
    let spec = build_xxz(7, 1.0, 0.95, FieldMode::Uniform { hx: 0.2, hz: 0.2 }).unwrap();
    assert_eq!(spec.terms.len(), 32);
    let bip = bipartition(&spec, 6, 1.0).unwrap();
    assert_eq!(bip.h_ab.terms.len(), 3);
    assert!(bip
        .h_b
        .terms
        .iter()
        .any(|t| t.string.n_body() == 1 && t.string.first_site() == Some(7)));
    assert!(build_xxz(1, 1.0, 1.0, FieldMode::none()).is_err());
}

#[test]
fn skin_depth_of_a_real_table_is_linear() {
    let spec = build_xxz(7, 1.0, 0.95, FieldMode::Uniform { hx: 0.2, hz: 0.2 }).unwrap();
    let bip = bipartition(&spec, 6, 1.0).unwrap();
    let solver = meanforce::HmfSolver::<Dd>::new(&bip).unwrap();
    for beta in [0.05, 0.2] {
        let res = solver.compute(Dd::from_f64(beta)).unwrap();
        for f in [Family::one_body(Axis::X), Family::pair(Axis::X, Axis::X)] {
            let t = solver.deviation_table(&res, &f.members(6).unwrap()).unwrap();
            let fit = fit_skin_depth(&t, &f).unwrap();
            assert!(fit.r_squared >= 0.99, "{} beta {beta}: {fit:?}", f.name);
        }
    }
}

#[test]
fn first_order_window_exponent_for_distance_two() {
    // one-body operator two sites from the cut decays as beta^5
    let spec = build_xxz(7, 1.0, 0.95, FieldMode::Uniform { hx: 0.2, hz: 0.2 }).unwrap();
    let bip = bipartition(&spec, 6, 1.0).unwrap();
    let solver = meanforce::HmfSolver::<Dd>::new(&bip).unwrap();
    let o = meanforce::PauliString::single(6, 4, Axis::X).unwrap();
    let samples: Vec<_> = log_grid(1e-3, 1e-2, 5)
        .into_iter()
        .map(|b| {
            let res = solver.compute(Dd::from_f64(b)).unwrap();
            let e = solver.deviation_table(&res, &[o]).unwrap().entries[0].clone();
            (b, e.value, e.below_floor)
        })
        .collect();
    let fit = fit_beta_exponent(&samples).unwrap();
    assert!((fit.slope - 5.0).abs() <= 0.1, "{fit:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn eigen_contract_on_random_input(m in arb_hermitian(8)) {
        let sd = hermitian_eigen(&m).unwrap();
        prop_assert!(sd.residual(&m) <= Dd::tol(16) * m.frobenius_norm());
        prop_assert!(sd.orthogonality_defect() <= Dd::tol(16) * Dd::from_f64(8.0));
        prop_assert!(sd.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let again = hermitian_eigen(&m).unwrap();
        prop_assert_eq!(sd.eigenvalues, again.eigenvalues);
        prop_assert_eq!(sd.eigenvectors, again.eigenvectors);
    }

    #[test]
    fn partial_trace_of_gram_is_positive(g in arb_hermitian(8), l_a in 1usize..3) {
        let pd = g.matmul(&g).add_identity(Dd::from_f64(1e-3));
        let r = partial_trace_b(&pd, 3, l_a).unwrap();
        let sd = hermitian_eigen(&r).unwrap();
        prop_assert!(sd.eigenvalues[0] > Dd::ZERO);
        prop_assert!((r.trace().re - pd.trace().re).abs() <= Dd::tol(20) * pd.trace().re);
    }

    #[test]
    fn exp_log_round_trip(g in arb_hermitian(4)) {
        let pd = g.matmul(&g).add_identity(Dd::ONE);
        let l = func_hermitian(&pd, SpectralFunction::Log).unwrap();
        let back = func_hermitian(&l, SpectralFunction::ExpScaled(-Dd::ONE)).unwrap();
        prop_assert!((&back - &pd).frobenius_norm() <= Dd::tol(24) * pd.frobenius_norm());
    }

    #[test]
    fn dump_round_trip_is_bit_exact(m in arb_hermitian(4)) {
        let mut buf = Vec::new();
        write_dump(&m, &mut buf).unwrap();
        let back: DenseOperator<Dd> = read_dump(buf.as_slice()).unwrap();
        prop_assert_eq!(&back, &m);
        let wide = DenseOperator::<F256>::from_fn(4, |i, j| {
            let z = m[(i, j)];
            Cplx::new(F256::from_f64(z.re.to_f64()), F256::from_f64(z.im.to_f64()))
        });
        let mut buf = Vec::new();
        write_dump(&wide, &mut buf).unwrap();
        prop_assert_eq!(read_dump::<F256>(buf.as_slice()).unwrap(), wide);
    }

    #[test]
    fn reassembly_for_random_models(
        l in 2usize..7,
        delta in -1.5f64..1.5,
        hx in 0.0f64..1.0,
        hz in 0.0f64..1.0,
        seed in any::<u64>(),
        scale in 0.1f64..2.0,
    ) {
        let spec = build_xxz(l, 1.0, delta, FieldMode::Disordered { hx, hz, seed }).unwrap();
        prop_assert_eq!(&spec, &build_xxz(l, 1.0, delta, FieldMode::Disordered { hx, hz, seed }).unwrap());
        prop_assert!(spec.terms.iter().all(|t| !t.string.is_identity()));
        let l_a = 1 + (seed as usize) % (l - 1);
        let bip = bipartition(&spec, l_a, scale).unwrap();
        let id_b = DenseOperator::<Dd>::identity(bip.d_b());
        let a = bip.h_a.dense::<Dd>().kron(&id_b);
        let ab = bip.h_ab.dense::<Dd>().scale(Dd::ONE / Dd::from_f64(scale));
        let sum = &(&a + &bip.h_b.dense::<Dd>()) + &ab;
        // coefficients are stored as f64, so J_AB c rounds once at 2^-53
        prop_assert!((&sum - &spec.dense::<Dd>()).max_abs().to_f64() <= 4.0 * f64::EPSILON);
        let exact = bipartition(&spec, l_a, 0.25).unwrap();
        let ab = exact.h_ab.dense::<Dd>().scale(Dd::from_f64(4.0));
        let sum = &(&a + &exact.h_b.dense::<Dd>()) + &ab;
        prop_assert_eq!(sum, spec.dense::<Dd>());
    }

    #[test]
    fn fits_are_scale_equivariant(
        slope in -5.0f64..-0.1,
        noise in proptest::collection::vec(-0.05f64..0.05, 6),
        factor in 1e-6f64..1e6,
    ) {
        let fam = Family::one_body(Axis::Z);
        let vals: Vec<(usize, f64)> = (0..6).map(|d| (d, (slope * d as f64 + noise[d]).exp())).collect();
        let scaled: Vec<(usize, f64)> = vals.iter().map(|&(d, v)| (d, v * factor)).collect();
        let a = fit_skin_depth(&table_of(&vals, &fam, 6), &fam).unwrap();
        let b = fit_skin_depth(&table_of(&scaled, &fam, 6), &fam).unwrap();
        prop_assert!((a.slope - b.slope).abs() <= 1e-9 * a.slope.abs());
        prop_assert!((b.intercept - a.intercept - factor.ln()).abs() <= 1e-9);
        prop_assert!((0.0..=1.0).contains(&a.r_squared));

        let grid = log_grid(1e-3, 1e-2, 5);
        let s1: Vec<_> = grid.iter().zip(&noise).map(|(&x, n)| (x, x.powf(-slope) * (1.0 + n), false)).collect();
        let s2: Vec<_> = s1.iter().map(|&(x, c, f)| (x, c * factor, f)).collect();
        let e1 = fit_beta_exponent(&s1).unwrap();
        let e2 = fit_beta_exponent(&s2).unwrap();
        prop_assert!((e1.slope - e2.slope).abs() <= 1e-9 * e1.slope.abs().max(1.0));

        let law: Vec<_> = grid.iter().zip(&noise).map(|(&b, n)| (b, 1.0 / (2.0 + n - 2.0 * b.ln()))).collect();
        prop_assert!(fit_skin_law(&law).unwrap().r_squared <= 1.0);
    }
}
