mod common;

use common::*;
use foxh_hetnet::coverage::*;
use foxh_hetnet::fading::{catalog, make_distribution, FadingSpec, Normalization};
use foxh_hetnet::fox_h::{HOrder, HParams};
use foxh_hetnet::quad::{integrate, integrate_to_infinity, QuadOptions};
use foxh_hetnet::special::gamma;
use proptest::prelude::*;
use std::f64::consts::PI;

const TOL: f64 = 1e-7;

fn two_tier(noise: f64, pathloss: PathLoss) -> NetworkConfig {
    net(vec![rayleigh_tier(1e-4, 10.0, 1.5, noise), rayleigh_tier(4e-4, 1.0, 1.0, noise)], 4.0, pathloss)
}

#[test]
fn rss_unbounded_matches_rayleigh_quadrature() {
    let cases = [
        net(vec![rayleigh_tier(1e-4, 1.0, 1.0, 1e-6)], 4.0, PathLoss::Unbounded),
        net(vec![rayleigh_tier(1e-3, 1.0, 3.0, 1e-4)], 3.5, PathLoss::Unbounded),
        two_tier(1e-6, PathLoss::Unbounded),
        two_tier(0.0, PathLoss::Unbounded),
    ];
    for cfg in cases {
        let got = coverage_rss_unbounded(&cfg, TOL).unwrap();
        let want = rayleigh_rss_unbounded(&cfg);
        assert!((got.value - want).abs() < 1e-6, "{} vs {want}", got.value);
        assert!(got.abs_error_estimate < 1e-4);
    }
}

#[test]
fn rss_dense_limit_drops_noise() {
    let cfg = two_tier(1e-3, PathLoss::Unbounded);
    let dense = coverage_rss_unbounded_dense(&cfg, TOL).unwrap().value;
    assert!((dense - rayleigh_rss_unbounded(&cfg.without_noise())).abs() < 1e-6);
    // single tier: 1 / (1 + Z(β))
    let one = net(vec![rayleigh_tier(1e-4, 1.0, 1.0, 1e-2)], 4.0, PathLoss::Unbounded);
    let v = coverage_rss_unbounded_dense(&one, TOL).unwrap().value;
    assert!((v - 1.0 / (1.0 + PI / 4.0)).abs() < 1e-7, "{v}");
}

#[test]
fn maxsinr_unbounded_matches_rayleigh_quadrature() {
    for noise in [0.0, 1e-6, 1e-3] {
        let cfg = two_tier(noise, PathLoss::Unbounded);
        let got = coverage_maxsinr_unbounded(&cfg, 1e-9).unwrap().value;
        let delta = cfg.delta();
        let g = gamma(1.0 + delta) * gamma(1.0 - delta);
        let want: f64 = cfg
            .tiers
            .iter()
            .map(|tk| {
                let d: f64 = cfg.tiers.iter().map(|t| PI * t.lambda * (tk.beta * t.power / tk.power).powf(delta) * g).sum();
                integrate_to_infinity(
                    |v| PI * tk.lambda * (-d * v - tk.beta * noise / tk.power * v * v).exp(),
                    0.0,
                    QuadOptions::new(0.0, 1e-13),
                )
                .value
            })
            .sum();
        assert!((got - want).abs() < 1e-9, "noise {noise}: {got} vs {want}");
    }
}

#[test]
fn maxsinr_interference_limited_anchor() {
    for spec in catalog() {
        let cfg = net(vec![tier(1e-4, 1.0, 1.0, 0.0, spec.clone())], 4.0, PathLoss::Unbounded);
        let v = coverage_maxsinr_il(&cfg).unwrap().value;
        assert!((v - 2.0 / PI).abs() < 1e-12, "{spec:?}: {v}");
    }
}

#[test]
fn rss_bounded_conditional_matches_rayleigh_quadrature() {
    let cfg = two_tier(1e-6, PathLoss::Bounded);
    for (k, r) in [(0, 0.0), (0, 12.0), (1, 3.0), (1, 40.0)] {
        let got = coverage_rss_bounded_conditional(&cfg, k, r, TOL).unwrap().value;
        let want = rayleigh_rss_bounded_conditional(&cfg, k, r);
        assert!((got - want).abs() < 1e-6, "k={k} r={r}: {got} vs {want}");
    }
}

#[test]
fn rss_bounded_is_the_average_of_the_conditional() {
    let cfg = two_tier(1e-6, PathLoss::Bounded);
    let got = coverage_rss_bounded(&cfg, TOL).unwrap();
    let o = QuadOptions::new(0.0, 1e-9);
    let mut want = 0.0;
    for k in 0..2 {
        let f = |r: f64| bounded_serving_density(&cfg, k, r) * rayleigh_rss_bounded_conditional(&cfg, k, r);
        want += integrate(f, 0.0, 60.0, o).value + integrate_to_infinity(f, 60.0, o).value;
    }
    assert!((got.value - want).abs() < 2e-6, "{} vs {want}", got.value);
    assert_eq!(got.diagnostics.per_tier.len(), 2);
}

#[test]
fn maxsinr_bounded_matches_rayleigh_quadrature() {
    for cfg in [two_tier(1e-6, PathLoss::Bounded), net(vec![rayleigh_tier(1e-3, 1.0, 2.0, 0.0)], 3.0, PathLoss::Bounded)] {
        let got = coverage_maxsinr_bounded(&cfg, TOL).unwrap().value;
        let want = rayleigh_maxsinr_bounded(&cfg);
        assert!((got - want).abs() < 2e-6, "{got} vs {want}");
    }
}

#[test]
fn bounded_never_exceeds_unbounded_for_the_same_geometry() {
    for noise in [0.0, 1e-6] {
        let u = two_tier(noise, PathLoss::Unbounded);
        let b = u.with_pathloss(PathLoss::Bounded);
        assert!(coverage_rss_bounded(&b, TOL).unwrap().value <= coverage_rss_unbounded(&u, TOL).unwrap().value);
        assert!(coverage_maxsinr_bounded(&b, TOL).unwrap().value <= coverage_maxsinr_unbounded(&u, TOL).unwrap().value);
    }
}

#[test]
fn fading_does_not_move_the_interference_limited_value() {
    let base = |spec: FadingSpec| {
        net(vec![tier(1e-4, 5.0, 1.0, 0.0, spec.clone()), tier(1e-3, 1.0, 2.0, 0.0, spec)], 4.0, PathLoss::Unbounded)
    };
    let specs = [
        FadingSpec::Nakagami { m: 1.0 },
        FadingSpec::Nakagami { m: 3.5 },
        FadingSpec::Egk { m: 1.2, kappa_s: 2.0, zeta: 1.0 },
    ];
    let vals: Vec<f64> = specs.iter().map(|s| coverage_maxsinr_il(&base(s.clone())).unwrap().value).collect();
    for v in &vals {
        assert!((v - vals[0]).abs() < 1e-12, "{vals:?}");
    }
}

#[test]
fn density_scaling_invariance() {
    let cfg = two_tier(0.0, PathLoss::Unbounded);
    let il = coverage_maxsinr_il(&cfg).unwrap().value;
    let dense = coverage_rss_unbounded_dense(&cfg, TOL).unwrap().value;
    for f in [10.0, 100.0] {
        let s = cfg.scale_densities(f);
        assert!((coverage_maxsinr_il(&s).unwrap().value - il).abs() < 1e-10);
        assert!((coverage_rss_unbounded_dense(&s, TOL).unwrap().value - dense).abs() < 1e-10);
    }
}

#[test]
fn bounded_dense_decays() {
    let cfg = net(vec![rayleigh_tier(1e-4, 1.0, 1.0, 0.0)], 4.0, PathLoss::Bounded);
    let mut prev = f64::INFINITY;
    for s in [1.0, 10.0, 100.0, 1000.0] {
        let v = coverage_rss_bounded_dense(&cfg, s, TOL).unwrap().value;
        assert!(v < prev, "scale {s}: {v} !< {prev}");
        prev = v;
    }
}

#[test]
fn noise_limit_is_interference_limited() {
    let quiet = two_tier(0.0, PathLoss::Unbounded);
    let il = coverage_maxsinr_il(&quiet).unwrap().value;
    let dense = coverage_rss_unbounded_dense(&quiet, TOL).unwrap().value;
    let mut prev_gap = f64::INFINITY;
    for noise in [1e-4, 1e-6, 1e-8, 1e-10] {
        let cfg = two_tier(noise, PathLoss::Unbounded);
        let gap = (coverage_maxsinr_unbounded(&cfg, 1e-10).unwrap().value - il).abs();
        assert!(gap < prev_gap);
        prev_gap = gap;
        let rss = coverage_rss_unbounded(&cfg, TOL).unwrap().value;
        assert!(rss <= dense + 1e-7);
    }
    assert!(prev_gap < 1e-5);
    let b = quiet.with_pathloss(PathLoss::Bounded);
    let bil = coverage_rss_bounded_il(&b, TOL).unwrap().value;
    let near = coverage_rss_bounded(&two_tier(1e-12, PathLoss::Bounded), TOL).unwrap().value;
    assert!((near - bil).abs() < 1e-6);
}

#[test]
fn invalid_configurations_are_rejected() {
    let low = net(vec![rayleigh_tier(1e-4, 1.0, 0.5, 0.0)], 4.0, PathLoss::Unbounded);
    assert!(matches!(coverage_maxsinr_il(&low), Err(CoverageError::InvalidConfig(_))));
    let noisy = two_tier(1e-6, PathLoss::Bounded);
    assert!(matches!(coverage_rss_bounded_il(&noisy, TOL), Err(CoverageError::InvalidConfig(_))));
    assert!(matches!(coverage_rss_bounded(&two_tier(0.0, PathLoss::Unbounded), TOL), Err(CoverageError::InvalidConfig(_))));
    assert!(coverage_rss_bounded_dense(&noisy.without_noise(), -1.0, TOL).is_err());
    let rayleigh_only = two_tier(0.0, PathLoss::Unbounded);
    assert!(coverage_alpha_mu_il(&rayleigh_only).is_ok());
}

#[test]
fn heavy_tail_without_fractional_moment_is_a_pole_hit() {
    // density ∝ x^{m−1} (1 + x)^{−m−0.3}: E[h^s] is infinite for s ≥ 0.3
    let spec = FadingSpec::RawH {
        order: HOrder { m: 1, n: 1, p: 1, q: 1 },
        params: HParams::new(1.0, 1.0, vec![-0.3], vec![1.0], vec![1.0], vec![1.0]),
        normalization: Normalization::Renormalize,
    };
    let t = Tier::new(1e-4, 1.0, 1.0, 0.0, make_distribution(&spec).unwrap());
    let cfg = net(vec![t], 4.0, PathLoss::Unbounded);
    assert!(matches!(coverage_maxsinr_il(&cfg), Err(CoverageError::PoleHit { .. })));
}

fn alpha_mu_net(params: &[(f64, f64, f64, f64)], alpha: f64) -> NetworkConfig {
    let tiers = params
        .iter()
        .map(|&(a, mu, beta, power)| tier(1e-4 * power.sqrt(), power, beta, 0.0, FadingSpec::AlphaMu { alpha: a, mu }))
        .collect();
    net(tiers, alpha, PathLoss::Unbounded)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn alpha_mu_closed_form_agrees(
        a1 in 0.6f64..3.0, mu1 in 0.5f64..4.0, b1 in 1.0f64..8.0,
        a2 in 0.6f64..3.0, mu2 in 0.5f64..4.0, b2 in 1.0f64..8.0,
        p2 in 0.01f64..1.0, alpha in 2.5f64..5.0,
    ) {
        let cfg = alpha_mu_net(&[(a1, mu1, b1, 1.0), (a2, mu2, b2, p2)], alpha);
        let general = coverage_maxsinr_il(&cfg).unwrap().value;
        let special = coverage_alpha_mu_il(&cfg).unwrap().value;
        prop_assert!(rel_err(special, general) <= 1e-8);
    }

    #[test]
    fn maxsinr_non_increasing_in_beta(b in 1.0f64..10.0, db in 0.0f64..5.0, noise in 0.0f64..1e-5, k in 0usize..2) {
        let mut lo = two_tier(noise, PathLoss::Unbounded);
        lo.tiers[k].beta = b;
        let mut hi = lo.clone();
        hi.tiers[k].beta = b + db;
        let (vl, vh) = (coverage_maxsinr_unbounded(&lo, 1e-9).unwrap().value, coverage_maxsinr_unbounded(&hi, 1e-9).unwrap().value);
        prop_assert!(vh <= vl + 1e-12);
        prop_assert!((0.0..=1.0 + 1e-9).contains(&vl));
    }

    #[test]
    fn rss_non_increasing_in_beta(b in 0.2f64..6.0, db in 0.05f64..3.0, k in 0usize..2) {
        let mut lo = two_tier(1e-6, PathLoss::Unbounded);
        lo.tiers[k].beta = b;
        let mut hi = lo.clone();
        hi.tiers[k].beta = b + db;
        let (vl, vh) = (coverage_rss_unbounded(&lo, TOL).unwrap().value, coverage_rss_unbounded(&hi, TOL).unwrap().value);
        prop_assert!(vh <= vl + 1e-6);
        prop_assert!((0.0..=1.0 + 1e-6).contains(&vl));
    }

    #[test]
    fn interference_limited_power_homogeneity(scale in 0.01f64..100.0, density in 0.1f64..100.0) {
        let cfg = two_tier(0.0, PathLoss::Unbounded);
        let mut scaled = cfg.scale_densities(density);
        for t in &mut scaled.tiers {
            t.power *= scale;
        }
        let a = coverage_maxsinr_il(&cfg).unwrap().value;
        prop_assert!((coverage_maxsinr_il(&scaled).unwrap().value - a).abs() < 1e-12);
    }
}
