//! Run configuration: a TOML file with `[model]`, `[bipartition]`, `[scan]`
//! and `[run]` sections. Every default is written back out by [`RunConfig::to_toml`],
//! so the echoed record fully determines a run.

use std::path::{Path, PathBuf};

use meanforce::analysis::{log_grid, Family};
use meanforce::model::{bipartition, build_xxz, Bipartition, FieldMode, ModelSpec};
use meanforce::pauli::Axis;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Uniform,
    Disordered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// Chain length L.
    pub sites: usize,
    pub j: f64,
    pub delta: f64,
    pub fields: FieldKind,
    pub hx: f64,
    pub hz: f64,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            sites: 7,
            j: 1.0,
            delta: 0.95,
            fields: FieldKind::Uniform,
            hx: 0.2,
            hz: 0.2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BipartitionConfig {
    pub l_a: usize,
    pub j_ab_scale: f64,
}

impl Default for BipartitionConfig {
    fn default() -> Self {
        BipartitionConfig {
            l_a: 6,
            j_ab_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    /// Explicit temperatures; when empty, `beta_points` log-spaced values
    /// over `[beta_min, beta_max]` are used.
    pub betas: Vec<f64>,
    pub beta_min: f64,
    pub beta_max: f64,
    pub beta_points: usize,
    /// Operator families as axis letters on consecutive sites, e.g. `"ZXX"`.
    pub families: Vec<String>,
    /// Largest body count enumerated by `series` and `selection-rules`.
    pub max_body: usize,
    pub k_max: usize,
    /// Coupling scales for `scan-coupling`.
    pub j_ab: Vec<f64>,
    pub coupling_beta: f64,
    /// Small-beta window for exponent fits.
    pub window: [f64; 2],
    pub gap_tol: Option<f64>,
    pub eps: Option<f64>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            betas: Vec::new(),
            beta_min: 1e-3,
            beta_max: 1.0,
            beta_points: 13,
            families: ["X", "Z", "XX", "YY", "ZZ", "ZXX", "XZXZ"]
                .map(String::from)
                .to_vec(),
            max_body: 2,
            k_max: 10,
            j_ab: Vec::new(),
            coupling_beta: 0.1672,
            window: [1e-3, 1e-2],
            gap_tol: None,
            eps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Requested mantissa bits; the smallest backend with at least this many is used.
    pub precision: u32,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
    pub out: PathBuf,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            precision: 106,
            threads: 0,
            out: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub bipartition: BipartitionConfig,
    pub scan: ScanConfig,
    pub run: RunSection,
}

fn usage(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{path}: {msg}"))
}

/// Parses a family such as `"XX"` or `"ZXX"`.
pub fn parse_family(text: &str) -> Result<Family> {
    let axes = text
        .chars()
        .map(|c| Axis::from_letter(c).ok_or_else(|| format!("unknown axis '{c}'")))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|m| usage("scan.families", format!("{text:?}: {m}")))?;
    if axes.is_empty() {
        return Err(usage("scan.families", "empty family"));
    }
    Ok(Family::contiguous(&axes))
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// The fields that determine the numbers: everything except the output
    /// directory and thread count. Echoed into every data file.
    pub fn echo(&self) -> String {
        #[derive(Serialize)]
        struct Echo<'a> {
            model: &'a ModelConfig,
            bipartition: &'a BipartitionConfig,
            scan: &'a ScanConfig,
            precision: u32,
        }
        toml::to_string(&Echo {
            model: &self.model,
            bipartition: &self.bipartition,
            scan: &self.scan,
            precision: self.run.precision,
        })
        .expect("config serializes")
    }

    /// Checks every field and materializes the derived defaults (beta grid,
    /// coupling list) so the echoed config is complete.
    pub fn resolve(mut self) -> Result<Self> {
        let m = &self.model;
        if m.sites < 2 || m.sites > 10 {
            return Err(usage("model.sites", format!("{} is outside 2..=10", m.sites)));
        }
        for (name, v) in [("model.j", m.j), ("model.delta", m.delta), ("model.hx", m.hx), ("model.hz", m.hz)] {
            if !v.is_finite() {
                return Err(usage(name, "must be finite"));
            }
        }
        let b = &self.bipartition;
        if b.l_a == 0 || b.l_a >= m.sites {
            return Err(usage(
                "bipartition.l_a",
                format!("{} must satisfy 1 <= l_a < sites = {}", b.l_a, m.sites),
            ));
        }
        if !b.j_ab_scale.is_finite() {
            return Err(usage("bipartition.j_ab_scale", "must be finite"));
        }
        let s = &mut self.scan;
        if s.betas.is_empty() {
            if !(s.beta_min > 0.0 && s.beta_max >= s.beta_min) || s.beta_points == 0 {
                return Err(usage("scan.beta_min", "need 0 < beta_min <= beta_max and beta_points >= 1"));
            }
            s.betas = log_grid(s.beta_min, s.beta_max, s.beta_points);
        }
        if let Some(b) = s.betas.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
            return Err(usage("scan.betas", format!("{b} is not a positive temperature inverse")));
        }
        if s.j_ab.is_empty() {
            s.j_ab = log_grid(0.1, 1.0, 7);
        }
        if s.j_ab.iter().any(|j| !j.is_finite()) {
            return Err(usage("scan.j_ab", "must be finite"));
        }
        if s.coupling_beta.is_nan() || s.coupling_beta <= 0.0 {
            return Err(usage("scan.coupling_beta", "must be positive"));
        }
        if !(s.window[0] > 0.0 && s.window[1] > s.window[0]) {
            return Err(usage("scan.window", "need 0 < lo < hi"));
        }
        if s.max_body == 0 || s.max_body > b.l_a {
            return Err(usage("scan.max_body", format!("{} must be in 1..={}", s.max_body, b.l_a)));
        }
        if s.k_max > meanforce::perturbation::MAX_ORDER {
            return Err(usage(
                "scan.k_max",
                format!("{} exceeds {}", s.k_max, meanforce::perturbation::MAX_ORDER),
            ));
        }
        if s.eps.is_some_and(|e| e < 0.0) {
            return Err(usage("scan.eps", "must be non-negative"));
        }
        for f in &s.families {
            parse_family(f)?;
        }
        meanforce::Backend::for_bits(self.run.precision).map_err(|e| usage("run.precision", e))?;
        Ok(self)
    }

    pub fn field_mode(&self) -> FieldMode {
        let m = &self.model;
        match m.fields {
            FieldKind::Uniform => FieldMode::Uniform { hx: m.hx, hz: m.hz },
            FieldKind::Disordered => FieldMode::Disordered {
                hx: m.hx,
                hz: m.hz,
                seed: m.seed,
            },
        }
    }

    pub fn model(&self) -> Result<ModelSpec> {
        let m = &self.model;
        Ok(build_xxz(m.sites, m.j, m.delta, self.field_mode())?)
    }

    pub fn bipartition_with(&self, j_ab_scale: f64) -> Result<Bipartition> {
        Ok(bipartition(&self.model()?, self.bipartition.l_a, j_ab_scale)?)
    }

    pub fn bipartition(&self) -> Result<Bipartition> {
        self.bipartition_with(self.bipartition.j_ab_scale)
    }

    pub fn families(&self) -> Result<Vec<Family>> {
        self.scan.families.iter().map(|f| parse_family(f)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default().resolve().unwrap();
        assert_eq!(cfg.scan.betas.len(), 13);
        let back = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn errors_name_the_field() {
        let err = RunConfig::from_toml("[bipartition]\nl_a = 9\n")
            .unwrap()
            .resolve()
            .unwrap_err();
        assert!(err.to_string().contains("bipartition.l_a"), "{err}");
        let err = RunConfig::from_toml("[scan]\nfamilies = [\"XQ\"]\n")
            .unwrap()
            .resolve()
            .unwrap_err();
        assert!(err.to_string().contains("scan.families"), "{err}");
        let err = RunConfig::from_toml("[model]\nsitez = 3\n").unwrap_err();
        assert!(err.to_string().contains("sitez"), "{err}");
    }
}
