//! `foxcov`: runs a coverage sweep described by a TOML scenario file.
//!
//! Exit status: 0 success, 2 parse error, 3 invalid scenario, 4 numerical
//! failure, 5 I/O error.

use clap::{Parser, ValueEnum};
use foxh_hetnet::scenario::{Method, Overrides, Scenario, ScenarioError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OnlyMethod {
    Analytic,
    Simulate,
}

#[derive(Debug, Parser)]
#[command(name = "foxcov", about = "Coverage sweeps for multi-tier cellular networks")]
struct Args {
    /// Scenario file (TOML).
    scenario: PathBuf,
    /// Absolute tolerance of analytic evaluations.
    #[arg(long)]
    tol: Option<f64>,
    /// Monte Carlo trials per sweep point.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Simulation window radius in meters.
    #[arg(long)]
    window_radius: Option<f64>,
    /// Run only one method.
    #[arg(long, value_enum)]
    only: Option<OnlyMethod>,
    /// CSV output path; the manifest goes next to it with a .json extension.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn run(args: Args) -> Result<(), ScenarioError> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ScenarioError::Validation(format!("thread pool: {e}")))?;
    }
    let mut scenario = Scenario::load(&args.scenario)?;
    scenario.apply(&Overrides {
        tol: args.tol,
        trials: args.trials,
        seed: args.seed,
        window_radius: args.window_radius,
        only: args.only.map(|m| match m {
            OnlyMethod::Analytic => Method::Analytic,
            OnlyMethod::Simulate => Method::Simulate,
        }),
        out: args.out,
    })?;
    let output = scenario.run()?;
    let (csv, manifest) = output.write(&args.scenario.with_extension("csv"))?;
    eprintln!("wrote {} rows to {} (manifest {})", output.rows.len(), csv.display(), manifest.display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("foxcov: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
