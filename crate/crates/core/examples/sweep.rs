//! Runs a scenario file (default: the two-tier density sweep) at a reduced
//! trial count and prints the CSV.
//!
//! cargo run --release --example sweep -- [scenario.toml] [trials]

use foxh_hetnet::scenario::{csv_string, Overrides, Scenario};
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/scenarios/two_tier_density.toml"));
    let trials = args.next().map(|t| t.parse()).transpose()?.unwrap_or(50_000);
    let mut scenario = Scenario::load(&path)?;
    scenario.apply(&Overrides { trials: Some(trials), ..Default::default() })?;
    let out = scenario.run()?;
    print!("{}", csv_string(&out.rows, true));
    Ok(())
}
