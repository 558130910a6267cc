//! The seven experiment commands. Each writes its CSV (and, where a figure
//! is natural, a gnuplot `.dat`) into the output directory and returns the
//! paths written.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use meanforce::analysis::{fit_beta_exponent, fit_skin_depth, fit_skin_law, Family, FitResult};
use meanforce::hmf::FLOOR_SHIFT;
use meanforce::pauli::{conjecture_k0, distance, enumerate_pauli, sign_exclusion_witness};
use meanforce::perturbation::{k0_lower_bound, k0_numeric, order_tables, default_tol};
use meanforce::{
    compute_hmf, deviation_table, rescaled_distance, CoefficientEntry, CoefficientTable, HmfSolver,
    PauliString, Real, SeriesEngine, TableKey,
};
use rayon::prelude::*;

use crate::config::{parse_family, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{num, read_csv, write_csv, write_dat, Metadata};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Coefficients of the family operators against beta.
    ScanBeta,
    /// Coefficients against distance from the cut, per beta.
    ScanDistance,
    /// Small-beta series coefficients and order reports.
    Series,
    /// Operators excluded by a sign assignment, checked numerically.
    SelectionRules,
    /// Distance between the rescaled HMF and the entanglement Hamiltonian.
    EntCompare,
    /// Skin depth across coupling strengths at fixed beta.
    ScanCoupling,
    /// Fits over the CSVs written by scan-distance and scan-beta.
    Fit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::ScanBeta => "scan-beta",
            Command::ScanDistance => "scan-distance",
            Command::Series => "series",
            Command::SelectionRules => "selection-rules",
            Command::EntCompare => "ent-compare",
            Command::ScanCoupling => "scan-coupling",
            Command::Fit => "fit",
        }
    }

    pub fn needs_backend(self) -> bool {
        self != Command::Fit
    }
}

pub struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub out: &'a Path,
    pub meta: Metadata,
}

/// Family members in config order, each operator once.
fn family_ops(families: &[(String, Family)], l_a: usize) -> Result<Vec<PauliString>> {
    let mut ops: Vec<PauliString> = Vec::new();
    for (_, f) in families {
        for o in f.members(l_a)? {
            if !ops.contains(&o) {
                ops.push(o);
            }
        }
    }
    Ok(ops)
}

fn named_families(cfg: &RunConfig) -> Result<Vec<(String, Family)>> {
    cfg.scan
        .families
        .iter()
        .map(|s| Ok((s.clone(), parse_family(s)?)))
        .collect()
}

/// All operators with `1..=max_body` factors on `l_a` sites.
fn enumerated_ops(l_a: usize, max_body: usize) -> Result<Vec<PauliString>> {
    let mut ops = Vec::new();
    for n in 1..=max_body {
        ops.extend(enumerate_pauli(l_a, n)?);
    }
    Ok(ops)
}

fn entry_row(e: &CoefficientEntry) -> [String; 4] {
    [
        e.operator.to_string(),
        e.n_body.to_string(),
        e.distance.to_string(),
        num(e.value),
    ]
}

fn beta_tables<T: Real>(
    solver: &HmfSolver<T>,
    betas: &[f64],
    ops: &[PauliString],
) -> Result<Vec<CoefficientTable>> {
    betas
        .par_iter()
        .map(|&b| {
            let res = solver.compute(T::from_f64(b)).map_err(CliError::job(format!("beta = {b}")))?;
            solver
                .deviation_table(&res, ops)
                .map_err(CliError::job(format!("beta = {b}")))
        })
        .collect()
}

fn floor_meta<T: Real>(meta: &mut Metadata, solver: &HmfSolver<T>) {
    let h = solver.h_norm();
    meta.set("h_norm", num(h.to_f64()));
    meta.set("floor", num((T::tol(FLOOR_SHIFT) * h.max(T::one())).to_f64()));
}

pub fn execute<T: Real>(ctx: &Context, command: Command) -> Result<Vec<PathBuf>> {
    match command {
        Command::ScanBeta => scan_beta::<T>(ctx),
        Command::ScanDistance => scan_distance::<T>(ctx),
        Command::Series => series::<T>(ctx),
        Command::SelectionRules => selection_rules::<T>(ctx),
        Command::EntCompare => ent_compare::<T>(ctx),
        Command::ScanCoupling => scan_coupling::<T>(ctx),
        Command::Fit => fit(ctx),
    }
}

fn scan_beta<T: Real>(ctx: &Context) -> Result<Vec<PathBuf>> {
    let cfg = ctx.cfg;
    let l_a = cfg.bipartition.l_a;
    let solver = HmfSolver::<T>::new(&cfg.bipartition()?)?;
    let ops = family_ops(&named_families(cfg)?, l_a)?;
    let betas = &cfg.scan.betas;
    let tables = beta_tables(&solver, betas, &ops)?;
    let mut meta = ctx.meta.clone();
    floor_meta(&mut meta, &solver);

    let mut rows = Vec::new();
    for (b, t) in betas.iter().zip(&tables) {
        for e in &t.entries {
            let [o, n, d, c] = entry_row(e);
            rows.push(vec![o, n, d, num(*b), c, e.below_floor.to_string()]);
        }
    }
    let csv = write_csv(
        ctx.out,
        "scan_beta.csv",
        &meta,
        &["operator", "n_body", "distance", "beta", "coefficient", "below_floor"],
        &rows,
    )?;
    let blocks: Vec<_> = ops
        .iter()
        .map(|o| {
            let pts = betas
                .iter()
                .zip(&tables)
                .filter_map(|(&b, t)| t.get(o).filter(|e| !e.below_floor).map(|e| (b, e.value.abs())))
                .collect();
            (format!("{o}: beta |c|"), pts)
        })
        .collect();
    let dat = write_dat(ctx.out, "scan_beta.dat", &meta, &blocks)?;
    Ok(vec![csv, dat])
}

fn scan_distance<T: Real>(ctx: &Context) -> Result<Vec<PathBuf>> {
    let cfg = ctx.cfg;
    let l_a = cfg.bipartition.l_a;
    let solver = HmfSolver::<T>::new(&cfg.bipartition()?)?;
    let families = named_families(cfg)?;
    let ops = family_ops(&families, l_a)?;
    let betas = &cfg.scan.betas;
    let tables = beta_tables(&solver, betas, &ops)?;
    let mut meta = ctx.meta.clone();
    floor_meta(&mut meta, &solver);

    let mut rows = Vec::new();
    let mut blocks = Vec::new();
    for (name, f) in &families {
        let members = f.members(l_a)?;
        for (b, t) in betas.iter().zip(&tables) {
            let mut pts = Vec::new();
            for o in &members {
                let e = t.get(o).expect("table covers family members");
                let [o, _, d, c] = entry_row(e);
                rows.push(vec![name.clone(), num(*b), o, d, c, e.below_floor.to_string()]);
                if !e.below_floor {
                    pts.push((e.distance as f64, e.value.abs()));
                }
            }
            blocks.push((format!("{name} beta={}: d |c|", num(*b)), pts));
        }
    }
    let csv = write_csv(
        ctx.out,
        "scan_distance.csv",
        &meta,
        &["family", "beta", "operator", "distance", "coefficient", "below_floor"],
        &rows,
    )?;
    let dat = write_dat(ctx.out, "scan_distance.dat", &meta, &blocks)?;
    Ok(vec![csv, dat])
}

fn series<T: Real>(ctx: &Context) -> Result<Vec<PathBuf>> {
    let cfg = ctx.cfg;
    let l_a = cfg.bipartition.l_a;
    let k_max = cfg.scan.k_max;
    let bip = cfg.bipartition()?;
    let engine = SeriesEngine::<T>::new(&bip, k_max)?;
    let coeffs = (0..=k_max)
        .into_par_iter()
        .map(|k| engine.coefficient(k).map_err(CliError::job(format!("order k = {k}"))))
        .collect::<Result<Vec<_>>>()?;
    let tol = default_tol(&coeffs);
    let ops = enumerated_ops(l_a, cfg.scan.max_body)?;
    let tables = order_tables(&coeffs, &ops)?;
    let mut meta = ctx.meta.clone();
    meta.set("k_max", k_max).set("k0_tol", num(tol.to_f64()));

    let mut rows = Vec::new();
    for (k, t) in tables.iter().enumerate() {
        for e in &t.entries {
            let [o, n, d, c] = entry_row(e);
            rows.push(vec![o, n, d, k.to_string(), c, e.below_floor.to_string()]);
        }
    }
    let csv = write_csv(
        ctx.out,
        "series.csv",
        &meta,
        &["operator", "n_body", "distance", "k", "c_k", "below_floor"],
        &rows,
    )?;

    let terms = bip.coupled().active_strings();
    let tol = tol.to_f64();
    let reports = ops
        .par_iter()
        .map(|o| {
            let conj = conjecture_k0(&terms, o, l_a, k_max)
                .map_err(CliError::job(format!("operator {o}")))?;
            Ok(vec![
                o.to_string(),
                k0_numeric(&tables, o, tol).map_or(String::new(), |k| k.to_string()),
                k0_lower_bound(o, l_a)?.to_string(),
                conj.map_or(String::new(), |k| k.to_string()),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let report = write_csv(
        ctx.out,
        "order_report.csv",
        &meta,
        &["operator", "k0_numeric", "k0_bound", "k0_conjecture"],
        &reports,
    )?;
    Ok(vec![csv, report])
}

/// `"2:XY"`: body count and sorted axis letters.
fn operator_class(o: &PauliString) -> String {
    let mut axes: Vec<char> = o.factors().iter().map(|f| f.1.letter()).collect();
    axes.sort_unstable();
    format!("{}:{}", o.n_body(), axes.into_iter().collect::<String>())
}

fn selection_rules<T: Real>(ctx: &Context) -> Result<Vec<PathBuf>> {
    let cfg = ctx.cfg;
    let l = cfg.model.sites;
    let l_a = cfg.bipartition.l_a;
    let bip = cfg.bipartition()?;
    let terms = bip.coupled().active_strings();
    let ops = enumerated_ops(l_a, cfg.scan.max_body)?;
    let witnesses = ops
        .iter()
        .map(|o| Ok(sign_exclusion_witness(&terms, &o.with_chain_length(l)?)))
        .collect::<Result<Vec<_>>>()?;
    let solver = HmfSolver::<T>::new(&bip)?;
    let tables = beta_tables(&solver, &cfg.scan.betas, &ops)?;
    let mut meta = ctx.meta.clone();
    floor_meta(&mut meta, &solver);

    let mut rows = Vec::new();
    let mut classes: BTreeMap<String, (usize, usize, Option<String>, bool)> = BTreeMap::new();
    for (o, w) in ops.iter().zip(&witnesses) {
        let max = tables.iter().map(|t| t.value(o).unwrap_or(0.0).abs()).fold(0.0, f64::max);
        let all_below = tables.iter().all(|t| t.get(o).is_some_and(|e| e.below_floor));
        rows.push(vec![
            o.to_string(),
            o.n_body().to_string(),
            distance(o, l_a)?.to_string(),
            w.is_some().to_string(),
            w.map_or(String::new(), |w| w.to_string()),
            num(max),
            all_below.to_string(),
        ]);
        let c = classes.entry(operator_class(o)).or_insert((0, 0, None, true));
        c.0 += 1;
        if let Some(w) = w {
            c.1 += 1;
            c.2.get_or_insert_with(|| w.to_string());
            c.3 &= all_below;
        }
    }
    let csv = write_csv(
        ctx.out,
        "selection_rules.csv",
        &meta,
        &[
            "operator",
            "n_body",
            "distance",
            "excluded",
            "witness",
            "max_abs_coefficient",
            "below_floor_all_beta",
        ],
        &rows,
    )?;
    // a class is excluded when every member carries a witness
    let class_rows: Vec<Vec<String>> = classes
        .into_iter()
        .map(|(name, (n, excl, w, zero))| {
            vec![
                name,
                n.to_string(),
                excl.to_string(),
                (excl == n).to_string(),
                if excl == n { w.unwrap_or_default() } else { String::new() },
                (excl > 0 && zero).to_string(),
            ]
        })
        .collect();
    let classes = write_csv(
        ctx.out,
        "selection_classes.csv",
        &meta,
        &["class", "operators", "excluded_operators", "class_excluded", "witness", "numerically_zero"],
        &class_rows,
    )?;
    Ok(vec![csv, classes])
}

fn ent_compare<T: Real>(ctx: &Context) -> Result<Vec<PathBuf>> {
    let cfg = ctx.cfg;
    let solver = HmfSolver::<T>::new(&cfg.bipartition()?)?;
    let ent = solver.entanglement(
        cfg.scan.gap_tol.map(T::from_f64),
        cfg.scan.eps.map(T::from_f64),
    )?;
    let rows = cfg
        .scan
        .betas
        .par_iter()
        .map(|&b| {
            let ctx = || format!("beta = {b}");
            let res = solver.compute(T::from_f64(b)).map_err(CliError::job(ctx()))?;
            let dev = (&res.hmf - solver.h_a()).normalized_norm();
            let dist = rescaled_distance(&res, &ent).map_err(CliError::job(ctx()))?;
            Ok((b, dev.to_f64(), dist.to_f64()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut meta = ctx.meta.clone();
    meta.set("gs_degeneracy", ent.gs_degeneracy)
        .set("reduced_rank", ent.reduced_rank)
        .set("regularization_eps", num(ent.regularization_eps.to_f64()))
        .set("gap_tol", num(ent.gap_tol.to_f64()))
        .set("ground_energy", num(ent.ground_energy.to_f64()));
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|&(b, dev, dist)| vec![num(b), num(dev), num(dist)])
        .collect();
    let csv = write_csv(
        ctx.out,
        "ent_compare.csv",
        &meta,
        &["beta", "hmf_minus_h_a", "rescaled_distance"],
        &csv_rows,
    )?;
    let blocks = vec![
        ("beta ||H* - H_A||".to_string(), rows.iter().map(|r| (r.0, r.1)).collect()),
        ("beta ||beta H* + ln Z* - H^E||".to_string(), rows.iter().map(|r| (r.0, r.2)).collect()),
    ];
    let dat = write_dat(ctx.out, "ent_compare.dat", &meta, &blocks)?;
    Ok(vec![csv, dat])
}

fn fit_fields(fit: Option<&FitResult>, derived: Option<f64>) -> [String; 6] {
    match fit {
        Some(f) => [
            num(f.slope),
            num(f.intercept),
            num(f.r_squared),
            f.points_used.to_string(),
            f.excluded_below_floor.to_string(),
            derived.map_or(String::new(), num),
        ],
        None => Default::default(),
    }
}

fn scan_coupling<T: Real>(ctx: &Context) -> Result<Vec<PathBuf>> {
    let cfg = ctx.cfg;
    let l_a = cfg.bipartition.l_a;
    let beta = cfg.scan.coupling_beta;
    let families = named_families(cfg)?;
    let ops = family_ops(&families, l_a)?;
    let tables = cfg
        .scan
        .j_ab
        .par_iter()
        .map(|&j| {
            let ctx = || format!("j_ab = {j}, beta = {beta}");
            let bip = cfg.bipartition_with(j)?;
            let res = compute_hmf::<T>(&bip, T::from_f64(beta)).map_err(CliError::job(ctx()))?;
            deviation_table(&res, &bip.h_a, &ops).map_err(CliError::job(ctx()))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut meta = ctx.meta.clone();
    meta.set("beta", num(beta));
    let mut rows = Vec::new();
    let mut blocks = Vec::new();
    for (name, f) in &families {
        let mut pts = Vec::new();
        for (&j, t) in cfg.scan.j_ab.iter().zip(&tables) {
            let fit = match fit_skin_depth(t, f) {
                Ok(fit) => Some(fit),
                Err(meanforce::Error::InsufficientData(_)) => None,
                Err(e) => return Err(e.into()),
            };
            if let Some(fit) = &fit {
                pts.push((j, fit.skin_depth()));
            }
            let mut row = vec![num(j), name.clone()];
            row.extend(fit_fields(fit.as_ref(), fit.as_ref().map(|f| f.skin_depth())));
            rows.push(row);
        }
        if let (Some(lo), Some(hi)) = (
            pts.iter().map(|p| p.1).reduce(f64::min),
            pts.iter().map(|p| p.1).reduce(f64::max),
        ) {
            meta.set(&format!("d_c_spread[{name}]"), num((hi - lo) / lo));
        }
        blocks.push((format!("{name}: j_ab d_c"), pts));
    }
    let csv = write_csv(
        ctx.out,
        "scan_coupling.csv",
        &meta,
        &[
            "j_ab",
            "family",
            "slope",
            "intercept",
            "r_squared",
            "points_used",
            "excluded_below_floor",
            "d_c",
        ],
        &rows,
    )?;
    let dat = write_dat(ctx.out, "scan_coupling.dat", &meta, &blocks)?;
    Ok(vec![csv, dat])
}

fn column(header: &[String], name: &str, path: &Path) -> Result<usize> {
    header.iter().position(|h| h == name).ok_or_else(|| {
        CliError::Usage(format!("{}: missing column {name:?}", path.display()))
    })
}

fn parse_num(text: &str, path: &Path) -> Result<f64> {
    text.parse()
        .map_err(|_| CliError::Usage(format!("{}: {text:?} is not a number", path.display())))
}

/// Skin-depth and skin-law fits from `scan_distance.csv`.
fn fit_distances(ctx: &Context, path: &Path, rows: &mut Vec<Vec<String>>) -> Result<()> {
    let l_a = ctx.cfg.bipartition.l_a;
    let (header, data) = read_csv(path)?;
    let [fam, beta, op, dist, coef, below] = ["family", "beta", "operator", "distance", "coefficient", "below_floor"]
        .map(|c| column(&header, c, path));
    let (fam, beta, op, dist, coef, below) = (fam?, beta?, op?, dist?, coef?, below?);

    // (family, beta bits) -> entries, in file order
    let mut groups: Vec<(String, f64, Vec<CoefficientEntry>)> = Vec::new();
    for r in &data {
        let b = parse_num(&r[beta], path)?;
        let operator = PauliString::parse(&r[op], l_a)?;
        let entry = CoefficientEntry {
            operator,
            n_body: operator.n_body(),
            distance: parse_num(&r[dist], path)? as usize,
            value: parse_num(&r[coef], path)?,
            below_floor: r[below] == "true",
        };
        match groups.iter_mut().find(|g| g.0 == r[fam] && g.1 == b) {
            Some(g) => g.2.push(entry),
            None => groups.push((r[fam].clone(), b, vec![entry])),
        }
    }
    let mut laws: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for (name, b, entries) in groups {
        let family = parse_family(&name)?;
        let table = CoefficientTable {
            key: TableKey::Beta(b),
            l_a,
            floor: 0.0,
            entries,
        };
        let fit = fit_skin_depth(&table, &family).ok();
        let mut row = vec!["skin_depth".into(), name.clone(), String::new(), num(b), num(b)];
        row.extend(fit_fields(fit.as_ref(), fit.as_ref().map(|f| f.skin_depth())));
        rows.push(row);
        if let Some(f) = fit {
            match laws.iter_mut().find(|l| l.0 == name) {
                Some(l) => l.1.push((b, f.skin_depth())),
                None => laws.push((name, vec![(b, f.skin_depth())])),
            }
        }
    }
    for (name, samples) in laws {
        let fit = fit_skin_law(&samples).ok();
        let lo = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
        let hi = samples.iter().map(|s| s.0).fold(0.0, f64::max);
        let mut row = vec!["skin_law".into(), name, String::new(), num(lo), num(hi)];
        row.extend(fit_fields(fit.as_ref(), fit.as_ref().map(|f| f.intercept)));
        rows.push(row);
    }
    Ok(())
}

type Sample = (f64, f64, bool);

/// Small-beta exponents from `scan_beta.csv` over the configured window.
fn fit_exponents(ctx: &Context, path: &Path, rows: &mut Vec<Vec<String>>) -> Result<()> {
    let [lo, hi] = ctx.cfg.scan.window;
    let (header, data) = read_csv(path)?;
    let [op, beta, coef, below] =
        ["operator", "beta", "coefficient", "below_floor"].map(|c| column(&header, c, path));
    let (op, beta, coef, below) = (op?, beta?, coef?, below?);
    // operator -> (beta, coefficient, below_floor) samples, in file order
    let mut series: Vec<(String, Vec<Sample>)> = Vec::new();
    for r in &data {
        let b = parse_num(&r[beta], path)?;
        // relative slack so grid points computed in f64 still land inside
        if b < lo * (1.0 - 1e-12) || b > hi * (1.0 + 1e-12) {
            continue;
        }
        let s = (b, parse_num(&r[coef], path)?, r[below] == "true");
        match series.iter_mut().find(|x| x.0 == r[op]) {
            Some(x) => x.1.push(s),
            None => series.push((r[op].clone(), vec![s])),
        }
    }
    for (name, samples) in series {
        let fit = fit_beta_exponent(&samples).ok();
        let mut row = vec!["beta_exponent".into(), String::new(), name, num(lo), num(hi)];
        row.extend(fit_fields(fit.as_ref(), fit.as_ref().map(|f| f.slope)));
        rows.push(row);
    }
    Ok(())
}

fn fit(ctx: &Context) -> Result<Vec<PathBuf>> {
    let distance_csv = ctx.out.join("scan_distance.csv");
    let beta_csv = ctx.out.join("scan_beta.csv");
    if !distance_csv.exists() && !beta_csv.exists() {
        return Err(CliError::Usage(format!(
            "fit needs scan_distance.csv or scan_beta.csv in {}; run scan-distance or scan-beta first",
            ctx.out.display()
        )));
    }
    let mut rows = Vec::new();
    if distance_csv.exists() {
        fit_distances(ctx, &distance_csv, &mut rows)?;
    }
    if beta_csv.exists() {
        fit_exponents(ctx, &beta_csv, &mut rows)?;
    }
    let csv = write_csv(
        ctx.out,
        "fits.csv",
        &ctx.meta,
        &[
            "kind",
            "family",
            "operator",
            "beta_lo",
            "beta_hi",
            "slope",
            "intercept",
            "r_squared",
            "points_used",
            "excluded_below_floor",
            "derived",
        ],
        &rows,
    )?;
    Ok(vec![csv])
}
