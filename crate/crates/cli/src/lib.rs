//! Experiment runner behind the `meanforce` binary. A run is a resolved
//! [`RunConfig`] plus one [`Command`]; outputs land in `run.out`.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use meanforce::model::DISORDER_RNG;
use meanforce::{Backend, Dd, F256};

pub use commands::Command;
pub use config::RunConfig;
pub use error::{CliError, Result};

use commands::{execute, Context};
use output::Metadata;

/// Resolves `cfg`, runs `command` and returns the files written.
pub fn run(cfg: RunConfig, command: Command) -> Result<Vec<PathBuf>> {
    let requested = cfg.run.precision;
    let cfg = cfg.resolve()?;
    let backend = Backend::for_bits(requested)?;
    let out = cfg.run.out.clone();
    std::fs::create_dir_all(&out).map_err(|source| CliError::Io {
        path: out.display().to_string(),
        source,
    })?;
    let config_path = out.join("run_config.toml");
    std::fs::write(&config_path, cfg.to_toml()).map_err(|source| CliError::Io {
        path: config_path.display().to_string(),
        source,
    })?;

    let mut meta = Metadata::new(&cfg.echo());
    meta.set("tool", concat!("meanforce ", env!("CARGO_PKG_VERSION")))
        .set("command", command.name());
    if command.needs_backend() {
        meta.set("precision_requested", requested)
            .set("precision_bits", backend.bits())
            .set("backend", backend.name())
            .set("rng", DISORDER_RNG)
            .set("seed", cfg.model.seed)
            .set("floor_rule", "2^(30 - precision_bits) * max(1, ||H||)");
    }
    let ctx = Context {
        cfg: &cfg,
        out: &out,
        meta,
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.run.threads)
        .build()
        .map_err(|e| CliError::Usage(format!("run.threads: {e}")))?;
    let mut written = pool.install(|| match backend {
        Backend::F64 => execute::<f64>(&ctx, command),
        Backend::DoubleDouble => execute::<Dd>(&ctx, command),
        Backend::Soft256 => execute::<F256>(&ctx, command),
    })?;
    written.insert(0, config_path);
    Ok(written)
}
