//! Named fading models as H-function power-gain densities, and samplers.
//!
//! Every named constructor fixes the scale `c` so that `E[H] = 1`.

use crate::fox_h::{mellin_moment, FoxHError, HFunction, HOrder, HParams, DEFAULT_TOL};
use crate::special::gamma;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use std::fmt;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

/// Largest `|∫f − 1|` accepted without an explicit policy.
pub const NORMALIZATION_TOL: f64 = 1e-6;

/// Nodes in the tabulated inverse CDF.
pub const INVERSE_CDF_NODES: usize = 2048;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FadingError {
    #[error("invalid fading parameters: {0}")]
    InvalidParams(String),
    #[error("density integrates to {mass}, off by {defect:e}")]
    Unnormalized { mass: f64, defect: f64 },
    #[error("sampling needs a normalized density (defect {0:e})")]
    UnnormalizedDistribution(f64),
    #[error("density is negative at x = {x} (value {value:e})")]
    NegativeDensity { x: f64, value: f64 },
    #[error(transparent)]
    FoxH(#[from] FoxHError),
}

pub type Result<T> = std::result::Result<T, FadingError>;

/// What to do when a raw parameterization does not integrate to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    #[default]
    Strict,
    AllowUnnormalized,
    Renormalize,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum FadingSpec {
    Rayleigh,
    Nakagami {
        m: f64,
    },
    AlphaMu {
        alpha: f64,
        mu: f64,
    },
    FisherF {
        m: f64,
        m_s: f64,
    },
    Egk {
        m: f64,
        kappa_s: f64,
        zeta: f64,
    },
    RawH {
        order: HOrder,
        params: HParams,
        #[serde(default)]
        normalization: Normalization,
    },
}

impl FadingSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(FadingError::InvalidParams(format!("{name} must be positive, got {v}")))
            }
        };
        match *self {
            FadingSpec::Rayleigh | FadingSpec::RawH { .. } => Ok(()),
            FadingSpec::Nakagami { m } => positive("m", m),
            FadingSpec::AlphaMu { alpha, mu } => {
                positive("alpha", alpha)?;
                positive("mu", mu)
            }
            FadingSpec::FisherF { m, m_s } => {
                positive("m", m)?;
                positive("m_s", m_s)?;
                if m_s <= 1.0 {
                    return Err(FadingError::InvalidParams(format!("unit mean power needs m_s > 1, got {m_s}")));
                }
                Ok(())
            }
            FadingSpec::Egk { m, kappa_s, zeta } => {
                positive("m", m)?;
                positive("kappa_s", kappa_s)?;
                positive("zeta", zeta)
            }
        }
    }

    fn label(&self) -> String {
        match *self {
            FadingSpec::Rayleigh => "rayleigh".into(),
            FadingSpec::Nakagami { m } => format!("nakagami(m={m})"),
            FadingSpec::AlphaMu { alpha, mu } => format!("alpha-mu(alpha={alpha}, mu={mu})"),
            FadingSpec::FisherF { m, m_s } => format!("fisher-f(m={m}, m_s={m_s})"),
            FadingSpec::Egk { m, kappa_s, zeta } => format!("egk(m={m}, kappa_s={kappa_s}, zeta={zeta})"),
            FadingSpec::RawH { order, .. } => format!("raw-h{order}"),
        }
    }
}

#[derive(Debug, Clone)]
enum Direct {
    // (G^{1/α}) / c
    AlphaMu { g: Gamma<f64>, inv_alpha: f64, c: f64 },
    // G_m / (c G_ms)
    GammaRatio { num: Gamma<f64>, den: Gamma<f64>, c: f64 },
    // (G_m G_κ)^{1/ζ} / c
    GammaProduct { g1: Gamma<f64>, g2: Gamma<f64>, inv_zeta: f64, c: f64 },
}

impl Direct {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Direct::AlphaMu { g, inv_alpha, c } => g.sample(rng).powf(*inv_alpha) / c,
            Direct::GammaRatio { num, den, c } => num.sample(rng) / (c * den.sample(rng)),
            Direct::GammaProduct { g1, g2, inv_zeta, c } => (g1.sample(rng) * g2.sample(rng)).powf(*inv_zeta) / c,
        }
    }
}

/// Power-gain density `f(x) = κ H^{m,n}_{p,q}(c x)` on `x > 0`.
#[derive(Debug, Clone)]
pub struct FoxHDistribution {
    pub h: HFunction,
    /// `|∫f − 1|` of the stored density.
    pub normalization_defect: f64,
    /// `∫f` before any renormalization.
    pub raw_mass: f64,
    pub name: Option<String>,
    /// The named model this density was built from, if any.
    pub spec: Option<FadingSpec>,
    direct: Option<Direct>,
    table: Arc<OnceLock<std::result::Result<Arc<InverseCdf>, FadingError>>>,
}

impl PartialEq for FoxHDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.h == other.h && self.name == other.name
    }
}

impl fmt::Display for FoxHDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.name {
            Some(n) => write!(f, "{n}"),
            None => write!(f, "{}", self.h),
        }
    }
}

fn gamma_dist(shape: f64) -> Result<Gamma<f64>> {
    Gamma::new(shape, 1.0).map_err(|e| FadingError::InvalidParams(format!("gamma shape {shape}: {e}")))
}

fn h_new(order: (usize, usize, usize, usize), params: HParams) -> Result<HFunction> {
    let (m, n, p, q) = order;
    Ok(HFunction::new(HOrder::new(m, n, p, q)?, params)?)
}

fn alpha_mu(alpha: f64, mu: f64) -> Result<(HFunction, Direct)> {
    let c = gamma(mu + 1.0 / alpha) / gamma(mu);
    let kappa = c / gamma(mu);
    let h = h_new((1, 0, 0, 1), HParams::new(kappa, c, vec![], vec![], vec![mu - 1.0 / alpha], vec![1.0 / alpha]))?;
    Ok((h, Direct::AlphaMu { g: gamma_dist(mu)?, inv_alpha: 1.0 / alpha, c }))
}

/// Builds the density for `spec` with the default (strict) policy for raw
/// parameterizations.
pub fn make_distribution(spec: &FadingSpec) -> Result<FoxHDistribution> {
    spec.validate()?;
    let (h, direct, policy) = match *spec {
        FadingSpec::Rayleigh => {
            let (h, d) = alpha_mu(1.0, 1.0)?;
            (h, Some(d), Normalization::Strict)
        }
        FadingSpec::Nakagami { m } => {
            let (h, d) = alpha_mu(1.0, m)?;
            (h, Some(d), Normalization::Strict)
        }
        FadingSpec::AlphaMu { alpha, mu } => {
            let (h, d) = alpha_mu(alpha, mu)?;
            (h, Some(d), Normalization::Strict)
        }
        FadingSpec::FisherF { m, m_s } => {
            let c = m / (m_s - 1.0);
            let kappa = c / (gamma(m) * gamma(m_s));
            let h = h_new((1, 1, 1, 1), HParams::new(kappa, c, vec![-m_s], vec![1.0], vec![m - 1.0], vec![1.0]))?;
            let d = Direct::GammaRatio { num: gamma_dist(m)?, den: gamma_dist(m_s)?, c };
            (h, Some(d), Normalization::Strict)
        }
        FadingSpec::Egk { m, kappa_s, zeta } => {
            let beta = gamma(m + 1.0 / zeta) / gamma(m);
            let beta_s = gamma(kappa_s + 1.0 / zeta) / gamma(kappa_s);
            let c = beta * beta_s;
            let kappa = c / (gamma(m) * gamma(kappa_s));
            let h = h_new(
                (2, 0, 0, 2),
                HParams::new(kappa, c, vec![], vec![], vec![m - 1.0 / zeta, kappa_s - 1.0 / zeta], vec![1.0 / zeta; 2]),
            )?;
            let d = Direct::GammaProduct { g1: gamma_dist(m)?, g2: gamma_dist(kappa_s)?, inv_zeta: 1.0 / zeta, c };
            (h, Some(d), Normalization::Strict)
        }
        FadingSpec::RawH { order, ref params, normalization } => {
            (HFunction::new(order, params.clone())?, None, normalization)
        }
    };
    let mut dist = FoxHDistribution::from_h(h, policy)?;
    dist.name = Some(spec.label());
    dist.spec = Some(spec.clone());
    dist.direct = direct;
    Ok(dist)
}

impl FoxHDistribution {
    /// Wraps an arbitrary H-function density, applying `policy` to its mass.
    pub fn from_h(h: HFunction, policy: Normalization) -> Result<Self> {
        let raw_mass = mellin_moment(&h, 0.0)?;
        if !(raw_mass.is_finite() && raw_mass > 0.0) {
            return Err(FadingError::InvalidParams(format!("density has mass {raw_mass}")));
        }
        let defect = (raw_mass - 1.0).abs();
        let h = match policy {
            Normalization::Strict if defect > NORMALIZATION_TOL => {
                return Err(FadingError::Unnormalized { mass: raw_mass, defect });
            }
            Normalization::Renormalize => h.with_kappa(h.kappa() / raw_mass),
            _ => h,
        };
        let normalization_defect = (mellin_moment(&h, 0.0)? - 1.0).abs();
        let dist = FoxHDistribution {
            h,
            normalization_defect,
            raw_mass,
            name: None,
            spec: None,
            direct: None,
            table: Arc::new(OnceLock::new()),
        };
        dist.probe_nonnegative()?;
        Ok(dist)
    }

    fn probe_nonnegative(&self) -> Result<()> {
        let x0 = 1.0 / self.h.scale();
        let mut peak = 0.0f64;
        let mut values = Vec::new();
        for k in -4..=4 {
            let x = x0 * 10f64.powf(0.5 * k as f64);
            let v = self.pdf(x)?;
            peak = peak.max(v.abs());
            values.push((x, v));
        }
        for (x, v) in values {
            if v < -1e-8 * peak {
                return Err(FadingError::NegativeDensity { x, value: v });
            }
        }
        Ok(())
    }

    pub fn is_normalized(&self) -> bool {
        self.normalization_defect <= NORMALIZATION_TOL
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        if x <= 0.0 || x == f64::INFINITY {
            return Ok(0.0);
        }
        Ok(self.h.eval(x, DEFAULT_TOL)?.value)
    }

    /// `P(X ≤ x)`, evaluated from whichever of the two integral H-functions
    /// is the smaller quantity.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        Ok(self.cdf_pair(x)?.0)
    }

    /// `P(X > x)`.
    pub fn ccdf(&self, x: f64) -> Result<f64> {
        Ok(self.cdf_pair(x)?.1)
    }

    fn cdf_pair(&self, x: f64) -> Result<(f64, f64)> {
        if x <= 0.0 {
            return Ok((0.0, 1.0));
        }
        let mass = 1.0 - self.normalization_defect_signed();
        let lower = self.h.integral_from_zero()?.eval(x, 1e-10)?.value;
        if lower <= 0.5 * mass {
            return Ok((lower, mass - lower));
        }
        let upper = self.h.integral_to_infinity()?.eval(x, 1e-10)?.value;
        Ok((mass - upper, upper))
    }

    fn normalization_defect_signed(&self) -> f64 {
        1.0 - mellin_moment(&self.h, 0.0).unwrap_or(1.0)
    }

    /// `E[X^s]`.
    pub fn moment(&self, s: f64) -> Result<f64> {
        Ok(mellin_moment(&self.h, s)?)
    }

    pub fn mean(&self) -> Result<f64> {
        self.moment(1.0)
    }

    /// Whether draws come from an exact transformation rather than the table.
    pub fn has_direct_sampler(&self) -> bool {
        self.direct.is_some()
    }

    /// The tabulated inverse CDF, built on first use and shared by clones.
    pub fn inverse_cdf(&self) -> Result<Arc<InverseCdf>> {
        if !self.is_normalized() {
            return Err(FadingError::UnnormalizedDistribution(self.normalization_defect));
        }
        self.table.get_or_init(|| InverseCdf::build(self).map(Arc::new)).clone()
    }

    /// A sampler handle for hot loops. Named models use their direct
    /// transformation, everything else the inverse-CDF table.
    pub fn sampler(&self) -> Result<Sampler> {
        if !self.is_normalized() {
            return Err(FadingError::UnnormalizedDistribution(self.normalization_defect));
        }
        match &self.direct {
            Some(d) => Ok(Sampler(SamplerKind::Direct(d.clone()))),
            None => Ok(Sampler(SamplerKind::Table(self.inverse_cdf()?))),
        }
    }

    /// Sampler that always goes through the inverse-CDF table.
    pub fn table_sampler(&self) -> Result<Sampler> {
        Ok(Sampler(SamplerKind::Table(self.inverse_cdf()?)))
    }
}

/// `count` i.i.d. draws from `dist`.
pub fn sample<R: Rng + ?Sized>(dist: &FoxHDistribution, rng: &mut R, count: usize) -> Result<Vec<f64>> {
    let s = dist.sampler()?;
    Ok((0..count).map(|_| s.draw(rng)).collect())
}

/// Cheap, cloneable draw handle obtained from [`FoxHDistribution::sampler`].
#[derive(Debug, Clone)]
pub struct Sampler(SamplerKind);

#[derive(Debug, Clone)]
enum SamplerKind {
    Direct(Direct),
    Table(Arc<InverseCdf>),
}

impl Sampler {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.0 {
            SamplerKind::Direct(d) => d.draw(rng),
            SamplerKind::Table(t) => t.quantile(rng.random::<f64>()),
        }
    }
}

impl Distribution<f64> for Sampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.draw(rng)
    }
}

/// Monotone cubic (Fritsch–Carlson) interpolant of `ln x` against `F` on
/// log-spaced nodes, with power-law extrapolation past both ends.
#[derive(Debug, Clone)]
pub struct InverseCdf {
    probs: Vec<f64>,
    ln_x: Vec<f64>,
    slopes: Vec<f64>,
    // d ln F / d ln x at the first node.
    left_exponent: f64,
    // d ln(1−F) / d ln x at the last node (negative).
    right_exponent: f64,
    right_tail: f64,
    // guide[g]: last node with probability at most g / GUIDE_CELLS.
    guide: Vec<u32>,
}

const TAIL_MASS: f64 = 1e-11;
const GUIDE_CELLS: usize = 4096;

impl InverseCdf {
    pub fn build(dist: &FoxHDistribution) -> Result<Self> {
        let x0 = match dist.mean() {
            Ok(m) if m.is_finite() && m > 0.0 => m,
            _ => 1.0 / dist.h.scale(),
        };
        // Bracket the bulk: F(lo) and 1 − F(hi) below TAIL_MASS.
        let mut lo = x0;
        let mut k = 0;
        while dist.cdf(lo)? > TAIL_MASS && k < 400 {
            lo *= 0.5;
            k += 1;
        }
        let mut hi = x0;
        k = 0;
        while dist.ccdf(hi)? > TAIL_MASS && k < 400 {
            hi *= 2.0;
            k += 1;
        }
        let (l0, l1) = (lo.ln(), hi.ln());
        let n = INVERSE_CDF_NODES;
        let mut probs = Vec::with_capacity(n);
        let mut ln_x = Vec::with_capacity(n);
        let mut tails = Vec::with_capacity(n);
        for i in 0..n {
            let u = l0 + (l1 - l0) * i as f64 / (n - 1) as f64;
            let (f, g) = dist.cdf_pair(u.exp())?;
            let prev = probs.last().copied().unwrap_or(0.0);
            // Tabulation noise must not break monotonicity.
            if f > prev && f < 1.0 {
                probs.push(f);
                ln_x.push(u);
                tails.push(g.max(f64::MIN_POSITIVE));
            }
        }
        if probs.len() < 4 {
            return Err(FadingError::InvalidParams("inverse CDF table degenerate".into()));
        }
        let len = probs.len();
        let left_exponent = ((probs[1] / probs[0]).ln() / (ln_x[1] - ln_x[0])).max(1e-3);
        let right_exponent =
            ((tails[len - 1] / tails[len - 2]).ln() / (ln_x[len - 1] - ln_x[len - 2])).min(-1e-3);
        let slopes = pchip_slopes(&probs, &ln_x);
        let guide = (0..=GUIDE_CELLS)
            .map(|g| {
                let u = g as f64 / GUIDE_CELLS as f64;
                probs.partition_point(|&p| p <= u).saturating_sub(1) as u32
            })
            .collect();
        Ok(InverseCdf { probs, ln_x, slopes, left_exponent, right_exponent, right_tail: tails[len - 1], guide })
    }

    /// Inverse CDF at `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let n = self.probs.len();
        if u <= self.probs[0] {
            let u = u.max(f64::MIN_POSITIVE);
            return (self.ln_x[0] + (u / self.probs[0]).ln() / self.left_exponent).exp();
        }
        if u >= self.probs[n - 1] {
            let t = (1.0 - u).max(f64::MIN_POSITIVE);
            return (self.ln_x[n - 1] + (t / self.right_tail).ln() / self.right_exponent).exp();
        }
        let mut i = self.guide[(u * GUIDE_CELLS as f64) as usize] as usize;
        while self.probs[i + 1] <= u {
            i += 1;
        }
        let (p0, p1) = (self.probs[i], self.probs[i + 1]);
        let h = p1 - p0;
        let t = (u - p0) / h;
        let (y0, y1) = (self.ln_x[i], self.ln_x[i + 1]);
        let (d0, d1) = (self.slopes[i], self.slopes[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        (h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1).exp()
    }

    pub fn nodes(&self) -> usize {
        self.probs.len()
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
    let del: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        if del[i - 1] * del[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
        }
    }
    d[0] = pchip_end(h[0], h[1], del[0], del[1]);
    d[n - 1] = pchip_end(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    d
}

fn pchip_end(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() {
        0.0
    } else if del0.signum() != del1.signum() && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

/// The (3,0,0,3) parameterization used in the two-tier reference scenario,
/// renormalized to unit mass.
pub fn reference_raw_h() -> FadingSpec {
    FadingSpec::RawH {
        order: HOrder { m: 3, n: 0, p: 0, q: 3 },
        params: HParams::new(0.2, 5.5, vec![], vec![], vec![1.5, 0.4, 4.5], vec![0.5; 3]),
        normalization: Normalization::Renormalize,
    }
}

/// The named catalog with representative parameters.
pub fn catalog() -> Vec<FadingSpec> {
    vec![
        FadingSpec::Rayleigh,
        FadingSpec::Nakagami { m: 2.5 },
        FadingSpec::AlphaMu { alpha: 2.0, mu: 1.5 },
        FadingSpec::FisherF { m: 2.0, m_s: 3.0 },
        FadingSpec::Egk { m: 1.2, kappa_s: 2.0, zeta: 1.0 },
    ]
}
