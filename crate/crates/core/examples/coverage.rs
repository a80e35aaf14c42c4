//! Analytic coverage of a two-tier network under both association rules and
//! both path-loss models.

use foxh_hetnet::coverage::*;
use foxh_hetnet::fading::{make_distribution, FadingSpec};

fn main() -> std::result::Result<(), Box<dyn std::error::Error>> {
    let macro_cell = Tier::new(1e-5, 40.0, 2.0, 1e-7, make_distribution(&FadingSpec::Nakagami { m: 2.0 })?);
    let small_cell = Tier::new(1e-4, 1.0, 1.0, 1e-7, make_distribution(&FadingSpec::Egk { m: 1.5, kappa_s: 2.5, zeta: 1.0 })?);
    let unbounded = NetworkConfig::new(vec![macro_cell, small_cell], 4.0, PathLoss::Unbounded)?;
    let bounded = unbounded.with_pathloss(PathLoss::Bounded);
    let tol = 1e-8;
    let runs = [
        ("RSS, r^-a", coverage_rss_unbounded(&unbounded, tol)?),
        ("RSS, (1+r)^-a", coverage_rss_bounded(&bounded, tol)?),
        ("max-SINR, r^-a", coverage_maxsinr_unbounded(&unbounded, tol)?),
        ("max-SINR, (1+r)^-a", coverage_maxsinr_bounded(&bounded, tol)?),
    ];
    for (name, r) in runs {
        println!("{name:<20} {:.8} (err {:.1e}, per tier {:?})", r.value, r.abs_error_estimate, r.diagnostics.per_tier);
    }

    // Without noise the r^-a model does not depend on density.
    let il = NetworkConfig::new(
        unbounded.tiers.iter().map(|t| Tier { noise: 0.0, ..t.clone() }).collect(),
        4.0,
        PathLoss::Unbounded,
    )?;
    for f in [1.0, 10.0, 100.0] {
        let s = il.scale_densities(f);
        println!("density x{f:<4} max-SINR {:.10}  RSS {:.10}", coverage_maxsinr_il(&s)?.value, coverage_rss_unbounded(&s, tol)?.value);
    }
    // The (1+r)^-a model decays once BSs crowd within a meter.
    let b_il = il.with_pathloss(PathLoss::Bounded);
    for f in [1e2, 1e3, 1e4, 1e5] {
        println!("bounded, density x{f:e}: {:.6e}", coverage_rss_bounded_dense(&b_il, f, tol)?.value);
    }
    Ok(())
}
