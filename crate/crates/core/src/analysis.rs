//! Straight-line fits in log space: decay with distance, the skin-depth law
//! and small-beta exponents.

use crate::error::{Error, Result};
use crate::pauli::{Axis, PauliString};
use crate::table::CoefficientTable;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points_used: usize,
    pub excluded_below_floor: usize,
}

impl FitResult {
    /// `d_c = -1 / slope` for a fit of `ln|c|` against `d`.
    pub fn skin_depth(&self) -> f64 {
        -1.0 / self.slope
    }
}

/// Ordinary least squares `y = slope x + intercept`.
pub fn ols(points: &[(f64, f64)]) -> Result<FitResult> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "a line needs at least 2 points, got {n}"
        )));
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all points share one abscissa".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    // constant data is fitted exactly by a flat line
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - sse / syy).clamp(0.0, 1.0) };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
        points_used: n,
        excluded_below_floor: 0,
    })
}

/// A translation family of operators: fixed axes at fixed offsets from the
/// first site, slid along the subsystem. Members differ only in distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    pub name: String,
    pub pattern: Vec<(usize, Axis)>,
}

impl Family {
    pub fn new(name: impl Into<String>, pattern: Vec<(usize, Axis)>) -> Result<Self> {
        if pattern.is_empty() || pattern[0].0 != 0 || pattern.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Usage(
                "family pattern needs strictly increasing offsets starting at 0".into(),
            ));
        }
        Ok(Family {
            name: name.into(),
            pattern,
        })
    }

    /// `sigma^a_j`
    pub fn one_body(a: Axis) -> Self {
        Family::new(format!("{}", a.letter()), vec![(0, a)]).expect("valid pattern")
    }

    /// `sigma^a_j sigma^b_{j+1}`
    pub fn pair(a: Axis, b: Axis) -> Self {
        Family::new(format!("{}{}", a.letter(), b.letter()), vec![(0, a), (1, b)])
            .expect("valid pattern")
    }

    /// Nearest-neighbour axes in the order given, e.g. `[Z, X, X]`.
    pub fn contiguous(axes: &[Axis]) -> Self {
        let name: String = axes.iter().map(|a| a.letter()).collect();
        Family::new(name, axes.iter().copied().enumerate().collect()).expect("valid pattern")
    }

    pub fn n_body(&self) -> usize {
        self.pattern.len()
    }

    fn span(&self) -> usize {
        self.pattern.last().map_or(0, |p| p.0)
    }

    /// Members in increasing distance, i.e. decreasing first site.
    pub fn members(&self, l_a: usize) -> Result<Vec<PauliString>> {
        let span = self.span();
        if span >= l_a {
            return Ok(Vec::new());
        }
        (1..=l_a - span)
            .rev()
            .map(|s| {
                let f: Vec<_> = self.pattern.iter().map(|&(o, a)| (s + o, a)).collect();
                PauliString::new(l_a, &f)
            })
            .collect()
    }

    pub fn contains(&self, o: &PauliString) -> bool {
        let f = o.factors();
        f.len() == self.pattern.len()
            && f.iter()
                .zip(&self.pattern)
                .all(|(&(s, a), &(off, b))| a == b && s == f[0].0 + off)
    }
}

/// `ln|c|` against `d` for the family members found in the table.
pub fn fit_skin_depth(table: &CoefficientTable, family: &Family) -> Result<FitResult> {
    let mut pts = Vec::new();
    let mut excluded = 0;
    for e in table.entries.iter().filter(|e| family.contains(&e.operator)) {
        if e.below_floor || e.value == 0.0 {
            excluded += 1;
        } else {
            pts.push((e.distance as f64, e.value.abs().ln()));
        }
    }
    let distinct = pts
        .iter()
        .map(|p| p.0 as i64)
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    if distinct < 2 {
        return Err(Error::InsufficientData(format!(
            "family {} has {distinct} distance(s) above the floor; 2 are needed",
            family.name
        )));
    }
    let mut fit = ols(&pts)?;
    fit.excluded_below_floor = excluded;
    Ok(fit)
}

/// `1/d_c` against `-2 ln beta`: slope near 1, intercept `a`.
pub fn fit_skin_law(samples: &[(f64, f64)]) -> Result<FitResult> {
    if samples.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "the skin law fit needs at least 3 temperatures, got {}",
            samples.len()
        )));
    }
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(beta, dc)| (-2.0 * beta.ln(), 1.0 / dc))
        .collect();
    ols(&pts)
}

/// `ln|c|` against `ln beta`. Samples are `(beta, c, below_floor)`.
pub fn fit_beta_exponent(samples: &[(f64, f64, bool)]) -> Result<FitResult> {
    let mut excluded = 0;
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter_map(|&(beta, c, below)| {
            if below || c == 0.0 {
                excluded += 1;
                None
            } else {
                Some((beta.ln(), c.abs().ln()))
            }
        })
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "exponent fit needs 3 samples above the floor, got {}",
            pts.len()
        )));
    }
    let mut fit = ols(&pts)?;
    fit.excluded_below_floor = excluded;
    Ok(fit)
}

/// `n` points log-spaced over `[lo, hi]`, endpoints included.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}
