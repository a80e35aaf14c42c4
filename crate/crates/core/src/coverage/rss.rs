//! Strongest-average-power association.
//!
//! For serving tier `k` the coverage is `(1/2πi) ∫ ω_k(s) M_{J_k}(s) ds`
//! with `ω_k(s) = E[h_k^s] β_k^{−s} / Γ(1+s)` and
//! `J_k(ξ) = E[e^{−ξ L(r)^{−1} (I + σ_k²) / P_k} ; tier k serves at r]`.

use super::kernel::{rho_table, RhoTable};
use super::parseval::{ln_moment, pair, MellinJ};
use super::{CoverageError, CoverageResult, NetworkConfig, PathLoss, Result};
use crate::quad::{integrate, QuadOptions};
use crate::special::ln_gamma;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

fn omega(cfg: &NetworkConfig, k: usize) -> impl Fn(Complex64) -> Complex64 + '_ {
    let t = &cfg.tiers[k];
    let ln_beta = t.beta.ln();
    move |s: Complex64| ln_moment(&t.fading, s) - s * ln_beta - ln_gamma(s + 1.0)
}

fn tables(cfg: &NetworkConfig, eps: f64) -> Result<Vec<Arc<RhoTable>>> {
    cfg.tiers.iter().map(|t| rho_table(&t.fading, eps)).collect()
}

// ∫₀^∞ e^{−v − κ v^{1/δ}} dv
fn noise_integral(kappa: f64, delta: f64) -> f64 {
    if kappa == 0.0 {
        return 1.0;
    }
    let r = crate::quad::integrate_to_infinity(
        |v| (-v - kappa * v.powf(1.0 / delta)).exp(),
        0.0,
        QuadOptions::new(0.0, 1e-13),
    );
    r.value
}

fn rss_unbounded_tier(cfg: &NetworkConfig, k: usize, tol: f64) -> Result<(f64, f64, usize, f64)> {
    let delta = cfg.delta();
    let tabs = tables(cfg, delta)?;
    let tk = &cfg.tiers[k];
    let weights: Vec<f64> = cfg.tiers.iter().map(|t| t.lambda * (t.power / tk.power).powf(delta)).collect();
    let w_sum: f64 = weights.iter().sum();
    let t_sum: f64 = weights.iter().zip(&tabs).map(|(w, t)| w * t.large_coef()).sum();
    let j0 = tk.lambda / w_sum;
    let noise = tk.noise / tk.power;
    let a = tk.lambda / t_sum * noise_integral(noise / (PI * t_sum).powf(1.0 / delta), delta);
    let j = |xi: f64| {
        let s: f64 = weights.iter().zip(&tabs).map(|(w, t)| w * (1.0 + t.value(xi))).sum();
        let kn = xi * noise / (PI * s).powf(1.0 / delta);
        tk.lambda / s * noise_integral(kn, delta)
    };
    let mj = MellinJ::sample(j, j0, Some((a, delta)), 0.5 * delta)?;
    let (v, e, n, t) = pair(omega(cfg, k), &mj, tol)?;
    Ok((v, e, n + mj.evaluations, t))
}

/// Average coverage under RSS association and `r^{−α}` path loss.
pub fn coverage_rss_unbounded(cfg: &NetworkConfig, tol: f64) -> Result<CoverageResult> {
    cfg.require(PathLoss::Unbounded)?;
    let parts = (0..cfg.tiers.len()).map(|k| rss_unbounded_tier(cfg, k, tol)).collect::<Result<Vec<_>>>()?;
    finish("rss-unbounded", parts, tol)
}

/// Limit of [`coverage_rss_unbounded`] as all densities grow without bound
/// in fixed ratio. Noise drops out; only density ratios remain.
pub fn coverage_rss_unbounded_dense(cfg: &NetworkConfig, tol: f64) -> Result<CoverageResult> {
    cfg.require(PathLoss::Unbounded)?;
    let quiet = cfg.without_noise();
    let parts = (0..quiet.tiers.len()).map(|k| rss_unbounded_tier(&quiet, k, tol)).collect::<Result<Vec<_>>>()?;
    finish("rss-unbounded-dense", parts, tol)
}

fn finish(method: &str, parts: Vec<(f64, f64, usize, f64)>, tol: f64) -> Result<CoverageResult> {
    let res = CoverageResult::from_tiers(method, parts);
    if !res.value.is_finite() {
        return Err(CoverageError::Numerical(format!("{method}: non-finite coverage")));
    }
    if res.abs_error_estimate > (100.0 * tol).max(1e-3) {
        return Err(CoverageError::QuadratureFailure { context: method.into(), abs_error: res.abs_error_estimate });
    }
    Ok(res)
}

/// Per-tier exponents of the bounded model for serving tier `k` at distance `r`.
struct Bounded<'a> {
    cfg: &'a NetworkConfig,
    k: usize,
    rel_power: Vec<f64>,
    full: Vec<Arc<RhoTable>>,
    half: Vec<Arc<RhoTable>>,
}

impl<'a> Bounded<'a> {
    fn new(cfg: &'a NetworkConfig, k: usize) -> Result<Self> {
        let delta = cfg.delta();
        let pk = cfg.tiers[k].power;
        Ok(Bounded {
            cfg,
            k,
            rel_power: cfg.tiers.iter().map(|t| t.power / pk).collect(),
            full: tables(cfg, delta)?,
            half: tables(cfg, 0.5 * delta)?,
        })
    }

    // Distances at which tier j's exclusion radius leaves zero.
    fn kinks(&self) -> Vec<f64> {
        let half_delta = 0.5 * self.cfg.delta();
        let mut v: Vec<f64> =
            self.rel_power.iter().map(|&p| p.powf(-half_delta) - 1.0).filter(|&r| r > 0.0 && r.is_finite()).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    }

    /// `Σ πλ_j e_j²`: minus log of the association probability at `r`.
    fn association(&self, r: f64) -> f64 {
        let half_delta = 0.5 * self.cfg.delta();
        self.cfg
            .tiers
            .iter()
            .zip(&self.rel_power)
            .map(|(t, &p)| {
                let e = ((1.0 + r) * p.powf(half_delta) - 1.0).max(0.0);
                PI * t.lambda * e * e
            })
            .sum()
    }

    /// Minus log of `E[e^{−ξ (1+r)^α (I + σ²) / P_k}]` given service at `r`.
    fn laplace_exponent(&self, r: f64, xi: f64) -> f64 {
        if xi == 0.0 {
            return 0.0;
        }
        let alpha = self.cfg.alpha;
        let half_delta = 0.5 * self.cfg.delta();
        let tk = &self.cfg.tiers[self.k];
        let mut acc = xi * (1.0 + r).powf(alpha) * tk.noise / tk.power;
        for (j, t) in self.cfg.tiers.iter().enumerate() {
            let p = self.rel_power[j];
            let y = ((1.0 + r) * p.powf(half_delta)).max(1.0);
            let xj = xi * p * ((1.0 + r) / y).powf(alpha);
            let v = y * y * self.full[j].value(xj) - 2.0 * y * self.half[j].value(xj);
            acc += PI * t.lambda * v.max(0.0);
        }
        acc
    }

    // Length scale of the serving-distance law.
    fn scale(&self) -> f64 {
        let delta = self.cfg.delta();
        let dens: f64 = self.cfg.tiers.iter().zip(&self.rel_power).map(|(t, &p)| t.lambda * p.powf(delta)).sum();
        1.0 / (PI * dens).sqrt()
    }

    fn averaged<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let lam = self.cfg.tiers[self.k].lambda;
        let g = |r: f64| 2.0 * PI * lam * r * f(r);
        let opts = QuadOptions::new(0.0, 1e-12);
        let mut nodes = vec![0.0];
        nodes.extend(self.kinks());
        let mut total = 0.0;
        for w in nodes.windows(2) {
            total += integrate(&g, w[0], w[1], opts).value;
        }
        let last = *nodes.last().unwrap();
        let l = self.scale();
        let tail = integrate(
            |u| {
                if u >= 1.0 {
                    return 0.0;
                }
                let r = last + l * u / (1.0 - u);
                let v = g(r) * l / ((1.0 - u) * (1.0 - u));
                if v.is_finite() { v } else { 0.0 }
            },
            0.0,
            1.0,
            opts,
        );
        total + tail.value
    }
}

fn rss_bounded_tier(cfg: &NetworkConfig, k: usize, tol: f64) -> Result<(f64, f64, usize, f64)> {
    let b = Bounded::new(cfg, k)?;
    let j0 = b.averaged(|r| (-b.association(r)).exp());
    let j = |xi: f64| b.averaged(|r| (-b.association(r) - b.laplace_exponent(r, xi)).exp());
    let mj = MellinJ::sample(j, j0, None, 0.5)?;
    let (v, e, n, t) = pair(omega(cfg, k), &mj, tol)?;
    Ok((v, e, n + mj.evaluations, t))
}

/// Average coverage under RSS association and `(1+r)^{−α}` path loss.
pub fn coverage_rss_bounded(cfg: &NetworkConfig, tol: f64) -> Result<CoverageResult> {
    cfg.require(PathLoss::Bounded)?;
    let parts = (0..cfg.tiers.len()).map(|k| rss_bounded_tier(cfg, k, tol)).collect::<Result<Vec<_>>>()?;
    finish("rss-bounded", parts, tol)
}

/// [`coverage_rss_bounded`] for a network without noise.
pub fn coverage_rss_bounded_il(cfg: &NetworkConfig, tol: f64) -> Result<CoverageResult> {
    if !cfg.interference_limited() {
        return Err(CoverageError::InvalidConfig("interference-limited evaluation needs zero noise in every tier".into()));
    }
    let mut res = coverage_rss_bounded(cfg, tol)?;
    res.diagnostics.method = "rss-bounded-il".into();
    Ok(res)
}

/// Interference-limited bounded coverage with all densities scaled by
/// `lambda_scale`. Decays to zero as the scale grows.
pub fn coverage_rss_bounded_dense(cfg: &NetworkConfig, lambda_scale: f64, tol: f64) -> Result<CoverageResult> {
    if !(lambda_scale.is_finite() && lambda_scale > 0.0) {
        return Err(CoverageError::InvalidConfig(format!("density scale must be positive, got {lambda_scale}")));
    }
    let scaled = cfg.scale_densities(lambda_scale);
    let mut res = coverage_rss_bounded_il(&scaled, tol)?;
    res.diagnostics.method = "rss-bounded-dense".into();
    Ok(res)
}

/// Coverage given that tier `k` serves from distance `r` under the bounded
/// model, the association event included in the conditioning.
pub fn coverage_rss_bounded_conditional(cfg: &NetworkConfig, k: usize, r: f64, tol: f64) -> Result<CoverageResult> {
    cfg.require(PathLoss::Bounded)?;
    if k >= cfg.tiers.len() {
        return Err(CoverageError::InvalidConfig(format!("tier index {k} out of range")));
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(CoverageError::InvalidConfig(format!("serving distance must be non-negative, got {r}")));
    }
    let b = Bounded::new(cfg, k)?;
    let j = |xi: f64| (-b.laplace_exponent(r, xi)).exp();
    let mj = MellinJ::sample(j, 1.0, None, 0.5)?;
    let (v, e, n, t) = pair(omega(cfg, k), &mj, tol)?;
    let mut res = finish("rss-bounded-conditional", vec![(v, e, n + mj.evaluations, t)], tol)?;
    res.diagnostics.per_tier = (0..cfg.tiers.len()).map(|j| if j == k { v } else { 0.0 }).collect();
    Ok(res)
}
