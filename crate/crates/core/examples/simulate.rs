//! Monte Carlo coverage next to the analytic values.

use foxh_hetnet::coverage::*;
use foxh_hetnet::fading::{make_distribution, reference_raw_h, FadingSpec};
use foxh_hetnet::sim::{estimate_all, estimate_coverage, SimConfig};

fn main() -> std::result::Result<(), Box<dyn std::error::Error>> {
    let tiers = vec![
        Tier::new(1e-4, 20.0, 1.5, 1e-6, make_distribution(&FadingSpec::Nakagami { m: 1.5 })?),
        Tier::new(5e-4, 1.0, 1.0, 1e-6, make_distribution(&reference_raw_h())?),
    ];
    let cfg = NetworkConfig::new(tiers, 4.0, PathLoss::Unbounded)?;
    let bounded = cfg.with_pathloss(PathLoss::Bounded);
    let analytic = [
        coverage_rss_unbounded(&cfg, 1e-7)?.value,
        coverage_maxsinr_unbounded(&cfg, 1e-9)?.value,
        coverage_rss_bounded(&bounded, 1e-7)?.value,
        coverage_maxsinr_bounded(&bounded, 1e-7)?.value,
    ];
    let batch = estimate_all(&cfg, 200_000, 11, None)?;
    println!("window {:.0} m, {} trials", batch.window_radius, batch.trials);
    for (est, want) in batch.estimates.iter().zip(analytic) {
        println!(
            "{:?}/{:?}: sim {:.5} ± {:.5}, analytic {:.5}, shares {:?}",
            est.association, est.pathloss, est.coverage, est.ci99_halfwidth, want, est.association_shares
        );
    }

    // escalate until the 99% interval is at most 0.002 wide on each side
    let sc = SimConfig::new(cfg, Association::MaxSinr, 50_000, 3).with_target(2e-3, 2_000_000);
    let est = estimate_coverage(&sc)?;
    println!("escalated run: {:.5} ± {:.5} after {} trials", est.coverage, est.ci99_halfwidth, est.trials_used);
    Ok(())
}
