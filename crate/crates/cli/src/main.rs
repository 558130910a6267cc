use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use meanforce_cli::{run, CliError, Command, RunConfig};

/// Computes Hamiltonians of mean force for a bipartitioned XXZ chain and
/// writes CSV and gnuplot tables.
#[derive(Debug, Parser)]
#[command(name = "meanforce", version)]
struct Args {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, env = "MEANFORCE_CONFIG")]
    config: Option<PathBuf>,

    #[arg(long, value_enum, env = "MEANFORCE_COMMAND")]
    command: Command,

    /// Output directory, overriding `run.out`.
    #[arg(long, env = "MEANFORCE_OUT")]
    out: Option<PathBuf>,

    /// Mantissa bits, overriding `run.precision`.
    #[arg(long, env = "MEANFORCE_PRECISION")]
    precision: Option<u32>,

    /// Worker threads, overriding `run.threads`.
    #[arg(long, env = "MEANFORCE_THREADS")]
    threads: Option<usize>,
}

fn main_inner(args: Args) -> Result<(), CliError> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(out) = args.out {
        cfg.run.out = out;
    }
    if let Some(p) = args.precision {
        cfg.run.precision = p;
    }
    if let Some(t) = args.threads {
        cfg.run.threads = t;
    }
    for path in run(cfg, args.command)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match main_inner(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("meanforce: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
