//! Closed-form oracles shared by the integration tests. None of these go
//! through the H-function machinery.
#![allow(dead_code)]

use foxh_hetnet::coverage::{NetworkConfig, PathLoss, Tier};
use foxh_hetnet::fading::{make_distribution, FadingSpec};
use foxh_hetnet::quad::{integrate, integrate_to_infinity, QuadOptions};
use foxh_hetnet::special::gamma;
use std::f64::consts::PI;

pub fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

/// Unit-mean generalized gamma density: `X = G^{1/a} / c`, `G ~ Gamma(μ, 1)`.
pub fn alpha_mu_pdf(a: f64, mu: f64, x: f64) -> f64 {
    let c = gamma(mu + 1.0 / a) / gamma(mu);
    let y = c * x;
    a * c * y.powf(a * mu - 1.0) * (-y.powf(a)).exp() / gamma(mu)
}

/// Unit-mean Fisher–Snedecor F density with shape `m` and shadowing `m_s > 1`.
pub fn fisher_f_pdf(m: f64, ms: f64, x: f64) -> f64 {
    let ln_beta = foxh_hetnet::special::ln_gamma_real(m).0 + foxh_hetnet::special::ln_gamma_real(ms).0
        - foxh_hetnet::special::ln_gamma_real(m + ms).0;
    let ln = m * m.ln() + ms * (ms - 1.0).ln() + (m - 1.0) * x.ln() - ln_beta - (m + ms) * (m * x + ms - 1.0).ln();
    ln.exp()
}

/// `∫₀^∞ f`, split at the mode region for accuracy.
pub fn mass<F: Fn(f64) -> f64>(f: F) -> f64 {
    let o = QuadOptions::new(0.0, 1e-12);
    integrate(&f, 0.0, 1.0, o).value + integrate_to_infinity(&f, 1.0, o).value
}

pub fn rayleigh_tier(lambda: f64, power: f64, beta: f64, noise: f64) -> Tier {
    Tier::new(lambda, power, beta, noise, make_distribution(&FadingSpec::Rayleigh).unwrap())
}

pub fn tier(lambda: f64, power: f64, beta: f64, noise: f64, spec: FadingSpec) -> Tier {
    Tier::new(lambda, power, beta, noise, make_distribution(&spec).unwrap())
}

pub fn net(tiers: Vec<Tier>, alpha: f64, pathloss: PathLoss) -> NetworkConfig {
    NetworkConfig::new(tiers, alpha, pathloss).unwrap()
}

/// `Z(β) = β^δ ∫_{β^{−δ}}^∞ du / (1 + u^{1/δ})`: the Rayleigh interference
/// term for interferers beyond the serving distance.
pub fn rayleigh_z(beta: f64, delta: f64) -> f64 {
    let lo = beta.powf(-delta);
    beta.powf(delta) * integrate_to_infinity(|u| 1.0 / (1.0 + u.powf(1.0 / delta)), lo, QuadOptions::new(0.0, 1e-13)).value
}

/// RSS coverage for Rayleigh tiers with `r^{−α}` path loss by direct
/// quadrature over the serving distance.
pub fn rayleigh_rss_unbounded(cfg: &NetworkConfig) -> f64 {
    let delta = cfg.delta();
    let alpha = cfg.alpha;
    cfg.tiers
        .iter()
        .map(|tk| {
            // Interferer of tier j beyond r P̃_j^{δ/2} sees relative threshold β_k P̃_j.
            let a: f64 = cfg
                .tiers
                .iter()
                .map(|t| {
                    let pt = t.power / tk.power;
                    PI * t.lambda * pt.powf(delta) * (1.0 + rayleigh_z(tk.beta, delta))
                })
                .sum();
            // r² = v
            integrate_to_infinity(
                |v| PI * tk.lambda * (-a * v - tk.beta * tk.noise / tk.power * v.powf(alpha / 2.0)).exp(),
                0.0,
                QuadOptions::new(0.0, 1e-13),
            )
            .value
        })
        .sum()
}

/// `−ln E[e^{−s I}]` for Rayleigh interferers of one tier in
/// `{x > inner}` with bounded path loss: `2πλ ∫ (1 − 1/(1 + s P (1+x)^{−α})) x dx`.
pub fn rayleigh_bounded_exponent(lambda: f64, sp: f64, alpha: f64, inner: f64) -> f64 {
    let f = |x: f64| {
        let g = sp * (1.0 + x).powf(-alpha);
        g / (1.0 + g) * x
    };
    let o = QuadOptions::new(0.0, 1e-13);
    let knee = inner.max(1.0) * 4.0;
    2.0 * PI * lambda * (integrate(f, inner, knee, o).value + integrate_to_infinity(f, knee, o).value)
}

/// Rayleigh RSS coverage under `(1+r)^{−α}` given tier `k` serves at `r`.
pub fn rayleigh_rss_bounded_conditional(cfg: &NetworkConfig, k: usize, r: f64) -> f64 {
    let alpha = cfg.alpha;
    let half = cfg.delta() / 2.0;
    let tk = &cfg.tiers[k];
    let s = tk.beta * (1.0 + r).powf(alpha) / tk.power;
    let mut e = s * tk.noise;
    for t in &cfg.tiers {
        let inner = ((1.0 + r) * (t.power / tk.power).powf(half) - 1.0).max(0.0);
        e += rayleigh_bounded_exponent(t.lambda, s * t.power, alpha, inner);
    }
    (-e).exp()
}

/// Probability density that tier `k` serves from distance `r` (bounded model).
pub fn bounded_serving_density(cfg: &NetworkConfig, k: usize, r: f64) -> f64 {
    let half = cfg.delta() / 2.0;
    let tk = &cfg.tiers[k];
    let void: f64 = cfg
        .tiers
        .iter()
        .map(|t| {
            let e = ((1.0 + r) * (t.power / tk.power).powf(half) - 1.0).max(0.0);
            PI * t.lambda * e * e
        })
        .sum();
    2.0 * PI * tk.lambda * r * (-void).exp()
}

/// Rayleigh max-SINR coverage under `(1+r)^{−α}`: every BS of tier `k`
/// contributes the probability that it alone clears the threshold.
pub fn rayleigh_maxsinr_bounded(cfg: &NetworkConfig) -> f64 {
    let alpha = cfg.alpha;
    let o = QuadOptions::new(0.0, 1e-11);
    cfg.tiers
        .iter()
        .map(|tk| {
            let f = |r: f64| {
                let s = tk.beta * (1.0 + r).powf(alpha) / tk.power;
                let e: f64 = s * tk.noise
                    + cfg.tiers.iter().map(|t| rayleigh_bounded_exponent(t.lambda, s * t.power, alpha, 0.0)).sum::<f64>();
                2.0 * PI * tk.lambda * r * (-e).exp()
            };
            integrate(f, 0.0, 200.0, o).value + integrate_to_infinity(f, 200.0, o).value
        })
        .sum()
}
