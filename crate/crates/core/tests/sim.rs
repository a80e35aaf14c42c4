mod common;

use common::*;
use foxh_hetnet::coverage::*;
use foxh_hetnet::fading::FadingSpec;
use foxh_hetnet::sim::*;
use std::f64::consts::PI;

fn single(beta: f64, noise: f64, pathloss: PathLoss) -> NetworkConfig {
    net(vec![rayleigh_tier(1e-4, 1.0, beta, noise)], 4.0, pathloss)
}

fn two_tier(noise: f64, pathloss: PathLoss) -> NetworkConfig {
    net(
        vec![rayleigh_tier(1e-4, 10.0, 1.5, noise), tier(4e-4, 1.0, 1.0, noise, FadingSpec::Nakagami { m: 2.0 })],
        4.0,
        pathloss,
    )
}

fn within(est: &SimEstimate, want: f64) -> bool {
    (est.coverage - want).abs() <= est.ci99_halfwidth
}

#[test]
fn deterministic_under_any_worker_count() {
    let sc = SimConfig::new(two_tier(1e-6, PathLoss::Unbounded), Association::Rss, 30_000, 42);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| estimate_coverage(&sc).unwrap())
    };
    let a = run(1);
    assert_eq!(a, run(3));
    assert_eq!(a, run(1));
    let other = estimate_coverage(&SimConfig { seed: 43, ..sc.clone() }).unwrap();
    assert_ne!(a.coverage, other.coverage);
}

#[test]
fn single_tier_anchor() {
    let est = estimate_coverage(&SimConfig::new(single(1.0, 0.0, PathLoss::Unbounded), Association::MaxSinr, 200_000, 1)).unwrap();
    assert!(within(&est, 2.0 / PI), "{est:?}");
    assert!((est.ci99_halfwidth - ci99(est.coverage, 200_000)).abs() < 1e-15);
}

#[test]
fn trivial_limits() {
    let sure = estimate_coverage(&SimConfig::new(single(1e-9, 0.0, PathLoss::Unbounded), Association::Rss, 20_000, 2)).unwrap();
    assert!(sure.coverage > 0.999, "{sure:?}");
    let sparse = net(vec![rayleigh_tier(1e-12, 1.0, 1.0, 1e-6)], 4.0, PathLoss::Unbounded);
    let void = estimate_coverage(&SimConfig::new(sparse, Association::Rss, 20_000, 2)).unwrap();
    assert_eq!(void.coverage, 0.0);
}

#[test]
fn agrees_with_analytic_values() {
    let n = 200_000;
    let checks: Vec<(NetworkConfig, Association, f64)> = {
        let u = two_tier(1e-6, PathLoss::Unbounded);
        let b = u.with_pathloss(PathLoss::Bounded);
        vec![
            (u.clone(), Association::Rss, coverage_rss_unbounded(&u, 1e-7).unwrap().value),
            (u.clone(), Association::MaxSinr, coverage_maxsinr_unbounded(&u, 1e-9).unwrap().value),
            (b.clone(), Association::Rss, coverage_rss_bounded(&b, 1e-7).unwrap().value),
            (b.clone(), Association::MaxSinr, coverage_maxsinr_bounded(&b, 1e-7).unwrap().value),
        ]
    };
    for (cfg, assoc, want) in checks {
        let est = estimate_coverage(&SimConfig::new(cfg.clone(), assoc, n, 9)).unwrap();
        assert!(within(&est, want), "{assoc:?} {:?}: {} ± {} vs {want}", cfg.pathloss, est.coverage, est.ci99_halfwidth);
    }
}

#[test]
fn batch_reports_every_combination_from_one_draw() {
    let cfg = two_tier(1e-6, PathLoss::Unbounded);
    let batch = estimate_all(&cfg, 50_000, 5, None).unwrap();
    assert_eq!(batch.estimates.len(), 4);
    let single = estimate_coverage(&SimConfig::new(cfg.clone(), Association::MaxSinr, 50_000, 5)).unwrap();
    let same = batch.estimates.iter().find(|e| e.association == Association::MaxSinr && e.pathloss == PathLoss::Unbounded).unwrap();
    assert_eq!(same.coverage, single.coverage);
    // an RSS success is a max-SINR success when thresholds match
    let equal = net(vec![rayleigh_tier(1e-4, 10.0, 1.0, 1e-6), rayleigh_tier(4e-4, 1.0, 1.0, 1e-6)], 4.0, PathLoss::Unbounded);
    let eq = estimate_all(&equal, 50_000, 5, None).unwrap();
    for pl in [PathLoss::Unbounded, PathLoss::Bounded] {
        let get = |a| eq.estimates.iter().find(|e| e.association == a && e.pathloss == pl).unwrap().coverage;
        assert!(get(Association::Rss) <= get(Association::MaxSinr));
    }
    let json = serde_json::to_value(&batch).unwrap();
    assert_eq!(json["estimates"][0]["trials_used"], 50_000);
    assert!(json["window_radius"].as_f64().unwrap() > 0.0);
}

#[test]
fn association_shares_follow_density_and_power() {
    let cfg = two_tier(0.0, PathLoss::Unbounded);
    let n = 100_000;
    let est = estimate_coverage(&SimConfig::new(cfg.clone(), Association::Rss, n, 8)).unwrap();
    let delta = cfg.delta();
    let w: Vec<f64> = cfg.tiers.iter().map(|t| t.lambda * (t.power / 10.0).powf(delta)).collect();
    let total: f64 = w.iter().sum();
    for (share, wk) in est.association_shares.iter().zip(&w) {
        let p = wk / total;
        assert!((share - p).abs() <= ci99(p, n), "{share} vs {p}");
    }
}

#[test]
fn doubling_the_window_stays_within_the_interval() {
    let cfg = two_tier(1e-6, PathLoss::Unbounded);
    let sc = SimConfig::new(cfg, Association::Rss, 100_000, 4);
    let base = estimate_coverage(&sc).unwrap();
    let wide = estimate_coverage(&sc.clone().with_window(2.0 * base.window_radius)).unwrap();
    assert!((base.coverage - wide.coverage).abs() < base.ci99_halfwidth, "{} vs {}", base.coverage, wide.coverage);
    assert!(wide.truncation_bias < base.truncation_bias);
}

#[test]
fn small_window_is_refused() {
    let sc = SimConfig::new(single(1.0, 0.0, PathLoss::Unbounded), Association::Rss, 100_000, 1).with_window(60.0);
    assert!(matches!(estimate_coverage(&sc), Err(SimError::WindowTooSmall { .. })));
}

#[test]
fn escalates_until_precise() {
    let sc = SimConfig::new(single(1.0, 0.0, PathLoss::Unbounded), Association::Rss, 1_000, 6).with_target(0.01, 1 << 20);
    let est = estimate_coverage(&sc).unwrap();
    assert!(est.ci99_halfwidth <= 0.01);
    assert!(est.trials_used.is_multiple_of(1_000) && (est.trials_used / 1_000).is_power_of_two());
    // the first 1000 trials are shared with the plain run
    let plain = estimate_coverage(&SimConfig::new(single(1.0, 0.0, PathLoss::Unbounded), Association::Rss, est.trials_used, 6).with_window(est.window_radius)).unwrap();
    assert_eq!(plain.coverage, est.coverage);
}

#[test]
fn conditional_matches_analytic() {
    let b = two_tier(1e-6, PathLoss::Bounded);
    for (k, r) in [(0, 0.0), (1, 8.0)] {
        let est = estimate_conditional(&SimConfig::new(b.clone(), Association::Rss, 100_000, 12).conditional(k, r)).unwrap();
        let want = coverage_rss_bounded_conditional(&b, k, r, 1e-7).unwrap().value;
        assert!(within(&est, want), "k={k} r={r}: {} ± {} vs {want}", est.coverage, est.ci99_halfwidth);
    }
    let lone = single(1.0, 1e-6, PathLoss::Bounded);
    let far = estimate_conditional(&SimConfig::new(lone, Association::Rss, 2_000, 12).conditional(0, 5_000.0).with_window(5_200.0)).unwrap();
    assert_eq!(far.coverage, 0.0);
}

#[test]
fn conditional_is_power_homogeneous_without_noise() {
    let cfg = single(1.0, 0.0, PathLoss::Unbounded);
    let mut loud = cfg.clone();
    loud.tiers[0].power = 1e3;
    let sc = |c: NetworkConfig| SimConfig::new(c, Association::Rss, 20_000, 3).conditional(0, 40.0).with_window(2_000.0);
    let a = estimate_conditional(&sc(cfg)).unwrap();
    let b = estimate_conditional(&sc(loud)).unwrap();
    assert!((a.coverage - b.coverage).abs() <= 1e-4, "{} vs {}", a.coverage, b.coverage);
}
