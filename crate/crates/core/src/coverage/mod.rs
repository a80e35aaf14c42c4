//! Analytic coverage probability of a multi-tier network.
//!
//! Tier `k` BSs form a PPP of density `λ_k`, transmit at `P_k`, and the
//! typical user at the origin is covered by tier `k` when the SINR of the
//! link reaches `β_k`. Two association rules are covered: strongest average
//! received power (RSS) and max-SINR. Path loss is `r^{−α}` or `(1+r)^{−α}`.
//!
//! RSS expressions go through a Mellin–Parseval pairing of the fading CCDF
//! with the Laplace functional of the interference; max-SINR expressions
//! are closed forms (unbounded) or a single Mellin–Barnes integral
//! (bounded).

mod kernel;
mod maxsinr;
mod parseval;
mod rss;

pub use kernel::{interference_kernel, rho_table, RhoTable};
pub use maxsinr::{coverage_alpha_mu_il, coverage_maxsinr_bounded, coverage_maxsinr_il, coverage_maxsinr_unbounded};
pub use rss::{
    coverage_rss_bounded, coverage_rss_bounded_conditional, coverage_rss_bounded_dense, coverage_rss_bounded_il,
    coverage_rss_unbounded, coverage_rss_unbounded_dense,
};

use crate::fading::{FadingError, FoxHDistribution};
use crate::fox_h::{mellin_moment, FoxHError};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoverageError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("quadrature did not reach tolerance (error estimate {abs_error:e}) in {context}")]
    QuadratureFailure { context: String, abs_error: f64 },
    #[error("moment of order {order} does not exist for this fading")]
    PoleHit { order: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    FoxH(FoxHError),
    #[error(transparent)]
    Fading(#[from] FadingError),
}

impl From<FoxHError> for CoverageError {
    fn from(e: FoxHError) -> Self {
        match e {
            FoxHError::PoleHit { s } | FoxHError::MomentUndefined { s, .. } => CoverageError::PoleHit { order: s },
            other => CoverageError::FoxH(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, CoverageError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathLoss {
    /// `L(r) = r^{−α}`
    Unbounded,
    /// `L(r) = (1 + r)^{−α}`
    Bounded,
}

impl PathLoss {
    pub fn gain(self, r: f64, alpha: f64) -> f64 {
        match self {
            PathLoss::Unbounded => r.powf(-alpha),
            PathLoss::Bounded => (1.0 + r).powf(-alpha),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PathLoss::Unbounded => "unbounded",
            PathLoss::Bounded => "bounded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Association {
    Rss,
    #[serde(alias = "maxsinr")]
    MaxSinr,
}

impl Association {
    pub fn label(self) -> &'static str {
        match self {
            Association::Rss => "rss",
            Association::MaxSinr => "maxsinr",
        }
    }
}

/// One network tier.
#[derive(Debug, Clone, PartialEq)]
pub struct Tier {
    /// BS density per unit area.
    pub lambda: f64,
    pub power: f64,
    /// Linear SINR threshold.
    pub beta: f64,
    /// Noise power `σ²` at the receiver for links to this tier.
    pub noise: f64,
    pub fading: FoxHDistribution,
}

impl Tier {
    pub fn new(lambda: f64, power: f64, beta: f64, noise: f64, fading: FoxHDistribution) -> Self {
        Tier { lambda, power, beta, noise, fading }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub tiers: Vec<Tier>,
    pub alpha: f64,
    pub pathloss: PathLoss,
}

impl NetworkConfig {
    pub fn new(tiers: Vec<Tier>, alpha: f64, pathloss: PathLoss) -> Result<Self> {
        let cfg = NetworkConfig { tiers, alpha, pathloss };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tiers.is_empty() {
            return Err(CoverageError::InvalidConfig("at least one tier is required".into()));
        }
        if !(self.alpha.is_finite() && self.alpha > 2.0) {
            return Err(CoverageError::InvalidConfig(format!("path-loss exponent must exceed 2, got {}", self.alpha)));
        }
        for (k, t) in self.tiers.iter().enumerate() {
            let ok = |v: f64| v.is_finite() && v > 0.0;
            if !ok(t.lambda) || !ok(t.power) || !ok(t.beta) {
                return Err(CoverageError::InvalidConfig(format!("tier {k}: density, power and threshold must be positive")));
            }
            if !(t.noise.is_finite() && t.noise >= 0.0) {
                return Err(CoverageError::InvalidConfig(format!("tier {k}: noise must be non-negative")));
            }
            if !t.fading.is_normalized() {
                return Err(CoverageError::InvalidConfig(format!(
                    "tier {k}: fading density is not normalized (defect {:e})",
                    t.fading.normalization_defect
                )));
            }
        }
        Ok(())
    }

    /// `δ = 2/α`.
    pub fn delta(&self) -> f64 {
        2.0 / self.alpha
    }

    pub fn interference_limited(&self) -> bool {
        self.tiers.iter().all(|t| t.noise == 0.0)
    }

    /// Same network with every density multiplied by `factor`.
    pub fn scale_densities(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.tiers {
            t.lambda *= factor;
        }
        out
    }

    /// Same network with all noise powers set to zero.
    pub fn without_noise(&self) -> Self {
        let mut out = self.clone();
        for t in &mut out.tiers {
            t.noise = 0.0;
        }
        out
    }

    pub fn with_pathloss(&self, pathloss: PathLoss) -> Self {
        NetworkConfig { pathloss, ..self.clone() }
    }

    fn require(&self, pathloss: PathLoss) -> Result<()> {
        self.validate()?;
        if self.pathloss != pathloss {
            return Err(CoverageError::InvalidConfig(format!("operation needs {} path loss", pathloss.label())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, serde::Serialize)]
pub struct Diagnostics {
    pub method: String,
    /// Integrand or H-function evaluations spent.
    pub evaluations: usize,
    /// Where the outer integral was cut (contour height or radius).
    pub truncation: f64,
    pub converged: bool,
    /// Contribution of each tier to the total.
    pub per_tier: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CoverageResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub diagnostics: Diagnostics,
}

impl CoverageResult {
    fn from_tiers(method: &str, parts: Vec<(f64, f64, usize, f64)>) -> Self {
        let value = parts.iter().map(|p| p.0).sum();
        let abs_error_estimate = parts.iter().map(|p| p.1).sum();
        let evaluations = parts.iter().map(|p| p.2).sum();
        let truncation = parts.iter().map(|p| p.3).fold(0.0, f64::max);
        CoverageResult {
            value,
            abs_error_estimate,
            diagnostics: Diagnostics {
                method: method.into(),
                evaluations,
                truncation,
                converged: true,
                per_tier: parts.iter().map(|p| p.0).collect(),
            },
        }
    }
}

/// `C(δ) = π² δ csc(π δ)`.
pub fn c_delta(delta: f64) -> f64 {
    PI * PI * delta / (PI * delta).sin()
}

/// `Λ = E[h^δ]` as a gamma product.
pub fn lambda_moment(dist: &FoxHDistribution, delta: f64) -> Result<f64> {
    Ok(mellin_moment(&dist.h, delta)?)
}

/// Evaluates whichever analytic expression matches `assoc` and the
/// configured path loss.
pub fn coverage(cfg: &NetworkConfig, assoc: Association, tol: f64) -> Result<CoverageResult> {
    match (assoc, cfg.pathloss) {
        (Association::Rss, PathLoss::Unbounded) => coverage_rss_unbounded(cfg, tol),
        (Association::Rss, PathLoss::Bounded) => coverage_rss_bounded(cfg, tol),
        (Association::MaxSinr, PathLoss::Unbounded) => coverage_maxsinr_unbounded(cfg, tol),
        (Association::MaxSinr, PathLoss::Bounded) => coverage_maxsinr_bounded(cfg, tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fading::{make_distribution, FadingSpec};

    #[test]
    fn scalar_helpers() {
        assert!((c_delta(0.5) - PI * PI / 2.0).abs() < 1e-14);
        let exp = make_distribution(&FadingSpec::Rayleigh).unwrap();
        assert!((lambda_moment(&exp, 0.5).unwrap() - crate::special::gamma(1.5)).abs() < 1e-14);
    }

    #[test]
    fn degenerate_exponent_rejected() {
        let t = Tier::new(1e-4, 1.0, 1.0, 0.0, make_distribution(&FadingSpec::Rayleigh).unwrap());
        assert!(matches!(NetworkConfig::new(vec![t.clone()], 2.0, PathLoss::Unbounded), Err(CoverageError::InvalidConfig(_))));
        assert!(NetworkConfig::new(vec![], 4.0, PathLoss::Unbounded).is_err());
        assert!(NetworkConfig::new(vec![t], 3.5, PathLoss::Bounded).is_ok());
    }
}
