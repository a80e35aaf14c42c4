//! Max-SINR association.
//!
//! With every `β_k ≥ 1` at most one BS can exceed its threshold, so
//! coverage is `Σ_k λ_k ∫ P(SINR at distance r ≥ β_k) dA` over the full
//! interference field.

use super::kernel::rho_table;
use super::parseval::{ln_moment, pair, MellinJ};
use super::{c_delta, lambda_moment, CoverageError, CoverageResult, NetworkConfig, PathLoss, Result};
use crate::fading::FadingSpec;
use crate::fox_h::{HFunction, HOrder, HParams};
use crate::special::{gamma, ln_gamma};
use num_complex::Complex64;
use std::f64::consts::PI;

fn require_thresholds(cfg: &NetworkConfig) -> Result<()> {
    if let Some(k) = cfg.tiers.iter().position(|t| t.beta < 1.0) {
        return Err(CoverageError::InvalidConfig(format!(
            "max-SINR coverage needs every threshold >= 1 (tier {k} has {})",
            cfg.tiers[k].beta
        )));
    }
    Ok(())
}

/// `x ↦ (π/Δ) H^{1,1}_{1,1}(Δ^{1/δ} x | (1,1) ; (1,1/δ))`, which equals
/// `(π/Δ) ∫₀^∞ e^{−y − (y/Δ)^{1/δ} / x} dy` and tends to `π/Δ` as `x → ∞`.
pub(crate) fn noise_factor(delta_k: f64, delta: f64) -> Result<HFunction> {
    Ok(HFunction::new(
        HOrder { m: 1, n: 1, p: 1, q: 1 },
        HParams::new(PI / delta_k, delta_k.powf(1.0 / delta), vec![1.0], vec![1.0], vec![1.0], vec![1.0 / delta]),
    )?)
}

/// Closed-form max-SINR coverage with `r^{−α}` path loss.
pub fn coverage_maxsinr_unbounded(cfg: &NetworkConfig, tol: f64) -> Result<CoverageResult> {
    cfg.require(PathLoss::Unbounded)?;
    require_thresholds(cfg)?;
    let delta = cfg.delta();
    let moments = cfg.tiers.iter().map(|t| lambda_moment(&t.fading, delta)).collect::<Result<Vec<_>>>()?;
    let g1m = gamma(1.0 - delta);
    let mut parts = Vec::with_capacity(cfg.tiers.len());
    for (k, tk) in cfg.tiers.iter().enumerate() {
        let delta_k: f64 = cfg
            .tiers
            .iter()
            .zip(&moments)
            .map(|(t, &m)| PI * t.lambda * (t.power / tk.power).powf(delta) * g1m * m)
            .sum();
        let (factor, err, evals) = if tk.noise == 0.0 {
            (PI / delta_k, 0.0, 0)
        } else {
            let e = noise_factor(delta_k, delta)?.eval(tk.power / tk.noise, tol.min(1e-8))?;
            (e.value, e.abs_error, e.evaluations)
        };
        let pre = tk.lambda * tk.beta.powf(-delta) * moments[k] / gamma(1.0 + delta);
        parts.push((pre * factor, pre * err, evals, 0.0));
    }
    Ok(CoverageResult::from_tiers("maxsinr-unbounded", parts))
}

fn il_closed_form(cfg: &NetworkConfig, moments: &[f64], method: &str) -> Result<CoverageResult> {
    let delta = cfg.delta();
    let den: f64 = cfg.tiers.iter().zip(moments).map(|(t, &m)| t.lambda * t.power.powf(delta) * m).sum();
    let scale = PI / c_delta(delta);
    let parts = cfg
        .tiers
        .iter()
        .zip(moments)
        .map(|(t, &m)| (scale * t.lambda * t.beta.powf(-delta) * t.power.powf(delta) * m / den, 0.0, 0, 0.0))
        .collect();
    Ok(CoverageResult::from_tiers(method, parts))
}

fn require_il(cfg: &NetworkConfig) -> Result<()> {
    cfg.require(PathLoss::Unbounded)?;
    require_thresholds(cfg)?;
    if !cfg.interference_limited() {
        return Err(CoverageError::InvalidConfig("interference-limited evaluation needs zero noise in every tier".into()));
    }
    Ok(())
}

/// Interference-limited max-SINR coverage, `r^{−α}` path loss:
/// `(π / C(δ)) Σ_k λ_k β_k^{−δ} P_k^δ Λ_k / Σ_j λ_j P_j^δ Λ_j`.
pub fn coverage_maxsinr_il(cfg: &NetworkConfig) -> Result<CoverageResult> {
    require_il(cfg)?;
    let delta = cfg.delta();
    let moments = cfg.tiers.iter().map(|t| lambda_moment(&t.fading, delta)).collect::<Result<Vec<_>>>()?;
    il_closed_form(cfg, &moments, "maxsinr-il")
}

/// [`coverage_maxsinr_il`] for α-μ tiers with `Λ` written out as
/// `Γ(μ + δ/a) Γ(μ)^{δ−1} / Γ(μ + 1/a)^δ` (fading shape `a`).
pub fn coverage_alpha_mu_il(cfg: &NetworkConfig) -> Result<CoverageResult> {
    require_il(cfg)?;
    let delta = cfg.delta();
    let mut moments = Vec::with_capacity(cfg.tiers.len());
    for (k, t) in cfg.tiers.iter().enumerate() {
        let (a, mu) = match t.fading.spec {
            Some(FadingSpec::AlphaMu { alpha, mu }) => (alpha, mu),
            Some(FadingSpec::Nakagami { m }) => (1.0, m),
            Some(FadingSpec::Rayleigh) => (1.0, 1.0),
            _ => return Err(CoverageError::InvalidConfig(format!("tier {k} is not alpha-mu faded"))),
        };
        moments.push(gamma(mu + delta / a) * gamma(mu).powf(delta - 1.0) / gamma(mu + 1.0 / a).powf(delta));
    }
    il_closed_form(cfg, &moments, "alpha-mu-il")
}

/// Max-SINR coverage with `(1+r)^{−α}` path loss: for each tier
/// `2πλ_k (1/2πi) ∫ E[h^s] (β_k/P_k)^{−s} M_J(s) / (Γ(1+s)(αs−1)(αs−2)) ds`
/// on `Re s ∈ (δ, 1)`, where `J(ξ) = e^{−σ_k² ξ} E[e^{−ξ I}]`.
pub fn coverage_maxsinr_bounded(cfg: &NetworkConfig, tol: f64) -> Result<CoverageResult> {
    cfg.require(PathLoss::Bounded)?;
    require_thresholds(cfg)?;
    let delta = cfg.delta();
    let alpha = cfg.alpha;
    let full = cfg.tiers.iter().map(|t| rho_table(&t.fading, delta)).collect::<Result<Vec<_>>>()?;
    let half = cfg.tiers.iter().map(|t| rho_table(&t.fading, 0.5 * delta)).collect::<Result<Vec<_>>>()?;
    let interference = |xi: f64| -> f64 {
        cfg.tiers
            .iter()
            .enumerate()
            .map(|(j, t)| {
                let a = xi * t.power;
                PI * t.lambda * (full[j].value(a) - 2.0 * half[j].value(a)).max(0.0)
            })
            .sum()
    };
    let gamma_line = 0.5 * (1.0 + delta);
    let mut parts = Vec::with_capacity(cfg.tiers.len());
    for tk in &cfg.tiers {
        let j = |xi: f64| (-tk.noise * xi - interference(xi)).exp();
        let mj = MellinJ::sample(j, 1.0, None, gamma_line)?;
        let ln_ratio = (tk.beta / tk.power).ln();
        let ln_pre = (2.0 * PI * tk.lambda).ln();
        let omega = |s: Complex64| {
            ln_pre + ln_moment(&tk.fading, s) - s * ln_ratio - ln_gamma(s + 1.0) - (alpha * s - 1.0).ln() - (alpha * s - 2.0).ln()
        };
        let (v, e, n, t) = pair(omega, &mj, tol)?;
        parts.push((v, e, n + mj.evaluations, t));
    }
    let res = CoverageResult::from_tiers("maxsinr-bounded", parts);
    if res.abs_error_estimate > (100.0 * tol).max(1e-3) {
        return Err(CoverageError::QuadratureFailure { context: "maxsinr-bounded".into(), abs_error: res.abs_error_estimate });
    }
    Ok(res)
}
