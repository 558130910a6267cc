//! Small-beta expansion `H*_A = sum_k beta^k H*_{A,k}`.
//!
//! With `X_n = tr_B(H^n) / (n! D_B)` and `y_n` the bath analogue,
//! `ln(tr_B e^{-beta H} / D_B) = sum_m (-1)^{m+1}/m (sum_n (-beta)^n X_n)^m`,
//! which gives
//!
//! `H*_{A,k} = (-1)^k sum_m (-1)^{m+1}/m sum_{n_1+..+n_m = k+1} (X_{n_1}..X_{n_m} - y_{n_1}..y_{n_m})`
//!
//! over ordered compositions. The composition sums are accumulated by a
//! recursion on the number of parts; the literal enumeration is kept as an
//! oracle.

use crate::error::{Error, Result};
use crate::hmf::{bath_on_own_sites, HmfResult, FLOOR_SHIFT};
use crate::linalg::{partial_trace_b, DenseOperator};
use crate::model::Bipartition;
use crate::pauli::{distance, PauliString};
use crate::scalar::Real;
use crate::table::{CoefficientTable, TableKey};

/// Cost guard on the series order.
pub const MAX_ORDER: usize = 16;

#[derive(Debug, Clone)]
pub struct SeriesCoefficient<T: Real> {
    pub order: usize,
    pub matrix: DenseOperator<T>,
    pub l_a: usize,
}

/// Cached `X_n` and `y_n` for `n <= k_max + 1`.
pub struct SeriesEngine<T: Real> {
    l_a: usize,
    k_max: usize,
    x: Vec<DenseOperator<T>>,
    y: Vec<T>,
    h_a: DenseOperator<T>,
    h_b: DenseOperator<T>,
    h_ab: DenseOperator<T>,
    full: DenseOperator<T>,
    l: usize,
}

fn check_order(k: usize, k_max: usize) -> Result<()> {
    if k > k_max {
        return Err(Error::Usage(format!(
            "series order {k} exceeds the configured maximum {k_max}"
        )));
    }
    Ok(())
}

impl<T: Real> SeriesEngine<T> {
    pub fn new(bip: &Bipartition, k_max: usize) -> Result<Self> {
        check_order(k_max, MAX_ORDER)?;
        let l = bip.n_sites();
        let l_a = bip.l_a;
        let d_b = T::from_f64(bip.d_b() as f64);
        let full = bip.coupled().dense::<T>();
        let bath = bath_on_own_sites(&bip.h_b, l_a)?.dense::<T>();
        let da = 1usize << l_a;
        let mut x = vec![DenseOperator::identity(da)];
        let mut y = vec![T::one()];
        let (mut pw, mut pw_b) = (full.clone(), bath.clone());
        let mut fact = T::one();
        for n in 1..=k_max + 1 {
            fact *= T::from_f64(n as f64);
            let norm = T::one() / (fact * d_b);
            x.push(partial_trace_b(&pw, l, l_a)?.scale(norm));
            y.push(pw_b.trace().re * norm);
            if n <= k_max {
                pw = pw.matmul(&full);
                pw_b = pw_b.matmul(&bath);
            }
        }
        Ok(SeriesEngine {
            l_a,
            k_max,
            x,
            y,
            h_a: bip.h_a.dense(),
            h_b: bip.h_b.dense(),
            h_ab: bip.h_ab.dense(),
            full,
            l,
        })
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn l_a(&self) -> usize {
        self.l_a
    }

    /// `H*_{A,k}` from the part-count recursion.
    pub fn coefficient(&self, k: usize) -> Result<SeriesCoefficient<T>> {
        check_order(k, self.k_max)?;
        let total = k + 1;
        let da = self.h_a.dim();
        // q[j]: sum over compositions of j into the current number of parts
        let mut q: Vec<DenseOperator<T>> = self.x[..=total].to_vec();
        let mut s: Vec<T> = self.y[..=total].to_vec();
        let mut acc = q[total].add_identity(-s[total]);
        for m in 2..=total {
            let mut nq = vec![DenseOperator::zeros(da); total + 1];
            let mut ns = vec![T::zero(); total + 1];
            for j in m..=total {
                for n in 1..=j + 1 - m {
                    nq[j] = &nq[j] + &q[j - n].matmul(&self.x[n]);
                    ns[j] += s[j - n] * self.y[n];
                }
            }
            q = nq;
            s = ns;
            let w = T::one() / T::from_f64(m as f64);
            let term = q[total].add_identity(-s[total]).scale(w);
            acc = if m % 2 == 1 { &acc + &term } else { &acc - &term };
        }
        Ok(self.finish(k, acc))
    }

    /// Applies the `(-1)^k` sign. Reversed compositions pair up into adjoints,
    /// so the exact sum is Hermitian; the Hermitian part drops the rounding
    /// residue, which grows with the cancellation at high order.
    fn finish(&self, k: usize, acc: DenseOperator<T>) -> SeriesCoefficient<T> {
        let sign = if k % 2 == 1 { -T::one() } else { T::one() };
        let half = T::one().mul_pow2(-1);
        SeriesCoefficient {
            order: k,
            matrix: (&acc + &acc.adjoint()).scale(sign * half),
            l_a: self.l_a,
        }
    }

    /// `H*_{A,k}` by enumerating every ordered composition of `k + 1`.
    pub fn coefficient_literal(&self, k: usize) -> Result<SeriesCoefficient<T>> {
        check_order(k, self.k_max)?;
        let da = self.h_a.dim();
        let mut acc = DenseOperator::zeros(da);
        let mut parts = Vec::new();
        self.compositions(k + 1, &mut parts, &mut acc);
        Ok(self.finish(k, acc))
    }

    fn compositions(&self, rest: usize, parts: &mut Vec<usize>, acc: &mut DenseOperator<T>) {
        if rest == 0 {
            let m = parts.len();
            let da = self.h_a.dim();
            let mut prod = DenseOperator::identity(da);
            let mut sc = T::one();
            for &n in parts.iter() {
                prod = prod.matmul(&self.x[n]);
                sc *= self.y[n];
            }
            let w = T::one() / T::from_f64(m as f64);
            let term = prod.add_identity(-sc).scale(w);
            *acc = if m % 2 == 1 { &*acc + &term } else { &*acc - &term };
            return;
        }
        for n in 1..=rest {
            parts.push(n);
            self.compositions(rest - n, parts, acc);
            parts.pop();
        }
    }

    /// Independent closed forms for `k <= 2`:
    /// `H_A`, `-tr_B(H_AB^2 + {H_B, H_AB}) / (2 D_B)` and
    /// `H_A^3/3 + tr_B H^3/(6 D_B) - {H_A, tr_B H^2}/(4 D_B) - y_3`.
    pub fn closed_form(&self, k: usize) -> Result<SeriesCoefficient<T>> {
        let d_b = T::from_f64((1usize << (self.l - self.l_a)) as f64);
        let matrix = match k {
            0 => self.h_a.clone(),
            1 => {
                let inner = &self.h_ab.matmul(&self.h_ab) + &self.h_b.anticommutator(&self.h_ab);
                partial_trace_b(&inner, self.l, self.l_a)?.scale(-T::one() / (T::from_f64(2.0) * d_b))
            }
            2 => {
                check_order(2, self.k_max)?;
                let h2 = self.full.matmul(&self.full);
                let h3 = h2.matmul(&self.full);
                let tr2 = partial_trace_b(&h2, self.l, self.l_a)?;
                let tr3 = partial_trace_b(&h3, self.l, self.l_a)?;
                let a3 = self.h_a.matmul(&self.h_a).matmul(&self.h_a);
                let first = &a3.scale(T::one() / T::from_f64(3.0)) + &tr3.scale(T::one() / (T::from_f64(6.0) * d_b));
                let second = self.h_a.anticommutator(&tr2).scale(T::one() / (T::from_f64(4.0) * d_b));
                (&first - &second).add_identity(-self.y[3])
            }
            _ => {
                return Err(Error::Usage(format!(
                    "closed forms exist for orders 0, 1 and 2, not {k}"
                )))
            }
        };
        Ok(SeriesCoefficient {
            order: k,
            matrix,
            l_a: self.l_a,
        })
    }

    /// Coefficients for `k = 0..=k_max`.
    pub fn coefficients(&self) -> Result<Vec<SeriesCoefficient<T>>> {
        (0..=self.k_max).map(|k| self.coefficient(k)).collect()
    }

    /// Per-order tables for `k = 0..=k_max`, all flagged against the shared
    /// tolerance [`default_tol`].
    pub fn tables(&self, ops: &[PauliString]) -> Result<Vec<CoefficientTable>> {
        order_tables(&self.coefficients()?, ops)
    }

    /// `||H*(beta) - sum_{k<=K} beta^k H*_k||_F / 2^(L_A/2)`
    pub fn truncation_error(&self, res: &HmfResult<T>, order: usize) -> Result<T> {
        check_order(order, self.k_max)?;
        let mut partial = DenseOperator::zeros(self.h_a.dim());
        let mut bk = T::one();
        for k in 0..=order {
            partial = &partial + &self.coefficient(k)?.matrix.scale(bk);
            bk *= res.beta;
        }
        Ok((&res.hmf - &partial).normalized_norm())
    }
}

pub fn series_coefficient<T: Real>(bip: &Bipartition, k: usize) -> Result<SeriesCoefficient<T>> {
    SeriesEngine::new(bip, k)?.coefficient(k)
}

/// `2^(-P + 30) max_k ||H*_{A,k}||` with the normalized Frobenius norm.
pub fn default_tol<T: Real>(coeffs: &[SeriesCoefficient<T>]) -> T {
    let m = coeffs
        .iter()
        .map(|c| c.matrix.normalized_norm())
        .fold(T::zero(), |a, b| a.max(b));
    T::tol(FLOOR_SHIFT) * m
}

fn order_table<T: Real>(
    coeff: &SeriesCoefficient<T>,
    ops: &[PauliString],
    floor: T,
) -> Result<CoefficientTable> {
    // order 0 is H_A itself, so its deviation from H_A vanishes identically
    let x = if coeff.order == 0 {
        DenseOperator::zeros(coeff.matrix.dim())
    } else {
        coeff.matrix.clone()
    };
    CoefficientTable::from_operator(TableKey::Order(coeff.order), &x, coeff.l_a, ops, floor)
}

/// One table per coefficient, all flagged against the shared [`default_tol`].
pub fn order_tables<T: Real>(
    coeffs: &[SeriesCoefficient<T>],
    ops: &[PauliString],
) -> Result<Vec<CoefficientTable>> {
    let tol = default_tol(coeffs);
    coeffs.iter().map(|c| order_table(c, ops, tol)).collect()
}

/// `c_k(O)` for each operator, flagged against `2^(-P + 30) max(1, ||H*_{A,k}||)`.
pub fn series_deviation_table<T: Real>(
    coeff: &SeriesCoefficient<T>,
    ops: &[PauliString],
) -> Result<CoefficientTable> {
    let floor = T::tol(FLOOR_SHIFT) * coeff.matrix.normalized_norm().max(T::one());
    order_table(coeff, ops, floor)
}

/// Smallest `k >= 1` with `|c_k(O)| > tol` among the given per-order tables.
pub fn k0_numeric(tables: &[CoefficientTable], o: &PauliString, tol: f64) -> Option<usize> {
    let mut hits: Vec<usize> = tables
        .iter()
        .filter_map(|t| match t.key {
            TableKey::Order(k) if k >= 1 => t.value(o).filter(|c| c.abs() > tol).map(|_| k),
            _ => None,
        })
        .collect();
    hits.sort_unstable();
    hits.first().copied()
}

/// `2(d + 1) - n`; can be zero or negative for wide operators near the cut.
pub fn k0_lower_bound(o: &PauliString, l_a: usize) -> Result<i64> {
    if o.is_identity() {
        return Err(Error::Usage("the lower bound is defined for non-identity operators".into()));
    }
    let d = distance(o, l_a)? as i64;
    Ok(2 * (d + 1) - o.n_body() as i64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderReport {
    pub operator: PauliString,
    pub k0_numeric: Option<usize>,
    pub k0_bound: i64,
    pub k0_conjecture: Option<usize>,
}

impl OrderReport {
    /// `k0_numeric >= k0_bound` whenever the numeric order was found.
    pub fn bound_holds(&self) -> bool {
        self.k0_numeric.is_none_or(|k| k as i64 >= self.k0_bound)
    }
}

/// Bound check for each operator; `conjecture` supplies the predicate value.
pub fn order_reports(
    tables: &[CoefficientTable],
    ops: &[PauliString],
    l_a: usize,
    tol: f64,
    mut conjecture: impl FnMut(&PauliString) -> Result<Option<usize>>,
) -> Result<Vec<OrderReport>> {
    ops.iter()
        .map(|o| {
            Ok(OrderReport {
                operator: *o,
                k0_numeric: k0_numeric(tables, o, tol),
                k0_bound: k0_lower_bound(o, l_a)?,
                k0_conjecture: conjecture(o)?,
            })
        })
        .collect()
}

/// `||H*(beta) - sum_{k<=K} beta^k H*_k||_F / 2^(L_A/2)` from scratch.
pub fn truncation_error<T: Real>(bip: &Bipartition, beta: T, order: usize) -> Result<T> {
    let res = crate::hmf::compute_hmf(bip, beta)?;
    SeriesEngine::new(bip, order)?.truncation_error(&res, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hmf::HmfSolver;
    use crate::model::{bipartition, build_xxz, FieldMode};
    use crate::pauli::{enumerate_all, Axis};
    use crate::scalar::Dd;

    fn bip(l: usize, l_a: usize, delta: f64, h: f64) -> Bipartition {
        let spec = build_xxz(l, 1.0, delta, FieldMode::Uniform { hx: h, hz: h }).unwrap();
        bipartition(&spec, l_a, 1.0).unwrap()
    }

    fn close(a: &DenseOperator<Dd>, b: &DenseOperator<Dd>, scale: Dd) -> bool {
        (a - b).normalized_norm() <= Dd::tol(FLOOR_SHIFT) * scale.max(Dd::ONE)
    }

    #[test]
    fn order_zero_is_bare_hamiltonian() {
        let b = bip(5, 3, 0.95, 0.2);
        let c = series_coefficient::<Dd>(&b, 0).unwrap();
        assert_eq!(c.matrix, b.h_a.dense::<Dd>());
        let ops = enumerate_all(3).unwrap();
        let t = series_deviation_table(&c, &ops).unwrap();
        assert!(t.entries.iter().all(|e| e.value == 0.0));
    }

    #[test]
    fn first_order_field_free_boundary() {
        // -tr_B(H_AB^2) / (2 D_B) = -(2 J^2 + Delta^2)/2
        let b = bip(5, 3, 0.95, 0.0);
        let c = series_coefficient::<Dd>(&b, 1).unwrap();
        let delta = Dd::from_f64(0.95);
        let value = -(Dd::from_f64(2.0) + delta * delta) / Dd::from_f64(2.0);
        assert!((value.to_f64() + 1.45125).abs() < 1e-15);
        let expect = DenseOperator::<Dd>::identity(8).scale(value);
        assert!(close(&c.matrix, &expect, Dd::ONE), "{:?}", c.matrix[(0, 0)]);
        let ops = enumerate_all(3).unwrap();
        let t = series_deviation_table(&c, &ops).unwrap();
        assert!(t.entries.iter().all(|e| e.below_floor));
    }

    #[test]
    fn recursion_literal_and_closed_forms_agree() {
        for (l, l_a, delta, h) in [(4, 2, 0.95, 0.2), (5, 3, 1.0, 1.0), (5, 2, 0.0, 0.3), (6, 4, 0.95, 0.2)] {
            let e = SeriesEngine::<Dd>::new(&bip(l, l_a, delta, h), 4).unwrap();
            for k in 0..=4 {
                let c = e.coefficient(k).unwrap().matrix;
                let lit = e.coefficient_literal(k).unwrap().matrix;
                let scale = c.normalized_norm();
                assert!(close(&c, &lit, scale), "L={l} k={k}");
                assert!(c.hermiticity_defect() <= Dd::tol(20) * c.frobenius_norm().max(Dd::ONE));
                if k <= 2 {
                    let cf = e.closed_form(k).unwrap().matrix;
                    assert!(close(&c, &cf, scale), "L={l} k={k} closed form");
                }
            }
        }
    }

    #[test]
    fn second_order_vanishes_far_from_the_cut() {
        let b = bip(6, 4, 0.95, 0.2);
        let c = series_coefficient::<Dd>(&b, 2).unwrap();
        let ops: Vec<_> = enumerate_all(4)
            .unwrap()
            .into_iter()
            .filter(|o| distance(o, 4).unwrap() > 1)
            .collect();
        let t = series_deviation_table(&c, &ops).unwrap();
        assert!(t.entries.iter().all(|e| e.below_floor));
    }

    #[test]
    fn numeric_orders_for_boundary_operators() {
        let b = bip(6, 4, 0.95, 0.2);
        let e = SeriesEngine::<Dd>::new(&b, 6).unwrap();
        let xl = PauliString::single(4, 4, Axis::X).unwrap();
        let xx = PauliString::parse("Z3 Z4", 4).unwrap();
        let tables = e.tables(&[xl, xx]).unwrap();
        let tol = default_tol(&e.coefficients().unwrap()).to_f64();
        assert_eq!(k0_numeric(&tables, &xl, tol), Some(1));
        assert_eq!(k0_numeric(&tables, &xx, tol), Some(2));
    }

    #[test]
    fn lower_bound_examples() {
        let p = |s: &str| PauliString::parse(s, 6).unwrap();
        assert_eq!(k0_lower_bound(&p("X6"), 6).unwrap(), 1);
        assert_eq!(k0_lower_bound(&p("X5 X6"), 6).unwrap(), 2);
        assert_eq!(k0_lower_bound(&p("X3 Y4 Z5 X6"), 6).unwrap(), 4);
        assert!(k0_lower_bound(&PauliString::identity(6).unwrap(), 6).is_err());
    }

    #[test]
    fn truncation_error_scaling() {
        let decoupled = bipartition(&build_xxz(4, 1.0, 0.95, FieldMode::none()).unwrap(), 2, 0.0).unwrap();
        for k in 0..=2 {
            assert!(truncation_error::<Dd>(&decoupled, Dd::from_f64(0.01), k).unwrap().to_f64() < 1e-28);
        }
        let b = bip(5, 3, 0.95, 0.2);
        let solver = HmfSolver::<Dd>::new(&b).unwrap();
        let e = SeriesEngine::<Dd>::new(&b, 2).unwrap();
        let first = e.coefficient(1).unwrap().matrix.normalized_norm().to_f64();
        let res = solver.compute(Dd::from_f64(1e-5)).unwrap();
        let ratio = e.truncation_error(&res, 0).unwrap().to_f64() / 1e-5;
        assert!((ratio / first - 1.0).abs() < 1e-3, "{ratio} vs {first}");
    }

    #[test]
    fn order_guard() {
        let b = bip(3, 2, 0.95, 0.2);
        assert!(matches!(SeriesEngine::<f64>::new(&b, MAX_ORDER + 1), Err(Error::Usage(_))));
        let e = SeriesEngine::<f64>::new(&b, 2).unwrap();
        assert!(e.coefficient(3).is_err());
        assert!(e.closed_form(3).is_err());
    }
}
