//! Poisson point process Monte Carlo estimator of coverage.
//!
//! Each trial drops every tier's BSs in a disc of radius `R` around the
//! user, draws one fading gain per BS, and records whether the user is
//! covered. Interference from beyond `R` is replaced by its Campbell mean,
//! which leaves a second-order bias in the relative far-field share `ε`.
//!
//! Trial `i` consumes ChaCha stream `i` of the seeded generator, so results
//! do not depend on the number of worker threads or on chunking.

use crate::coverage::{Association, NetworkConfig, PathLoss};
use crate::fading::{FadingError, Sampler};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.576;
const CHUNK: u64 = 2048;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("window radius {radius} too small: truncation bias bound {bias:e} exceeds 0.1 x design CI half-width {halfwidth:e}")]
    WindowTooSmall { radius: f64, bias: f64, halfwidth: f64 },
    #[error("invalid simulation setup: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Fading(#[from] FadingError),
}

pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub network: NetworkConfig,
    /// `None` picks the radius from the target precision.
    pub window_radius: Option<f64>,
    pub trials: u64,
    pub seed: u64,
    pub association: Association,
    /// Pins a serving BS of `serving_tier` at this distance.
    pub conditional_distance: Option<f64>,
    pub serving_tier: usize,
    /// Keep doubling the trial count until the CI half-width is at most this.
    pub target_halfwidth: Option<f64>,
    pub max_trials: u64,
}

impl SimConfig {
    pub fn new(network: NetworkConfig, association: Association, trials: u64, seed: u64) -> Self {
        SimConfig {
            network,
            window_radius: None,
            trials,
            seed,
            association,
            conditional_distance: None,
            serving_tier: 0,
            target_halfwidth: None,
            max_trials: 1 << 26,
        }
    }

    pub fn with_window(mut self, radius: f64) -> Self {
        self.window_radius = Some(radius);
        self
    }

    pub fn conditional(mut self, tier: usize, distance: f64) -> Self {
        self.serving_tier = tier;
        self.conditional_distance = Some(distance);
        self
    }

    pub fn with_target(mut self, halfwidth: f64, max_trials: u64) -> Self {
        self.target_halfwidth = Some(halfwidth);
        self.max_trials = max_trials;
        self
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SimEstimate {
    pub coverage: f64,
    pub ci99_halfwidth: f64,
    pub trials_used: u64,
    /// Fraction of trials served by each tier under RSS (empty when conditional).
    pub association_shares: Vec<f64>,
    pub window_radius: f64,
    /// Bound on the bias from the far-field mean substitution.
    pub truncation_bias: f64,
    pub seed: u64,
    pub association: Association,
    pub pathloss: PathLoss,
}

pub fn ci99(p: f64, n: u64) -> f64 {
    Z99 * (p * (1.0 - p) / n as f64).sqrt()
}

/// Relative far-field share `ε` for a window of radius `R`: mean
/// interference from beyond `R` in units of the received power at the
/// typical nearest-BS distance `r₀ = (πΣλ_j P̃_j^δ)^{−1/2}`.
pub fn far_field_share(net: &NetworkConfig, radius: f64) -> f64 {
    let alpha = net.alpha;
    let delta = net.delta();
    let pmax = net.tiers.iter().map(|t| t.power).fold(0.0, f64::max);
    let dens: f64 = net.tiers.iter().map(|t| t.lambda * (t.power / pmax).powf(delta)).sum();
    let r0 = 1.0 / (PI * dens).sqrt();
    let far: f64 = net.tiers.iter().map(|t| 2.0 * PI * t.lambda * t.power * radius.powf(2.0 - alpha) / (alpha - 2.0)).sum();
    far / (pmax * r0.powf(-alpha))
}

/// Default radius: the far-field share squared, which bounds the bias of
/// the mean substitution, is held at 5% of the target half-width.
pub fn default_window(net: &NetworkConfig, target_halfwidth: f64) -> f64 {
    let eps = (0.05 * target_halfwidth).sqrt();
    // far_field_share scales as R^{2−α}
    let probe = 1.0;
    let at_probe = far_field_share(net, probe);
    probe * (at_probe / eps).powf(1.0 / (net.alpha - 2.0))
}

/// Campbell mean of interference from beyond `radius`.
fn far_mean(net: &NetworkConfig, pathloss: PathLoss, radius: f64) -> f64 {
    let a = net.alpha;
    net.tiers
        .iter()
        .map(|t| {
            let mean_h = t.fading.mean().unwrap_or(1.0);
            let radial = match pathloss {
                PathLoss::Unbounded => radius.powf(2.0 - a) / (a - 2.0),
                PathLoss::Bounded => (1.0 + radius).powf(2.0 - a) / (a - 2.0) - (1.0 + radius).powf(1.0 - a) / (a - 1.0),
            };
            2.0 * PI * t.lambda * t.power * mean_h * radial
        })
        .sum()
}

/// Integer tallies over a batch of trials.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    pub trials: u64,
    /// Covered counts indexed `[pathloss][association]`, unbounded/bounded × rss/maxsinr.
    pub covered: [[u64; 2]; 2],
    /// RSS serving-tier counts per path-loss model.
    pub served: [Vec<u64>; 2],
}

impl Tally {
    fn new(tiers: usize) -> Self {
        Tally { trials: 0, covered: [[0; 2]; 2], served: [vec![0; tiers], vec![0; tiers]] }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.trials += other.trials;
        for p in 0..2 {
            for a in 0..2 {
                self.covered[p][a] += other.covered[p][a];
            }
            for (x, y) in self.served[p].iter_mut().zip(&other.served[p]) {
                *x += y;
            }
        }
        self
    }

    pub fn coverage(&self, pathloss: PathLoss, assoc: Association) -> f64 {
        self.covered[pl_index(pathloss)][as_index(assoc)] as f64 / self.trials as f64
    }
}

fn pl_index(p: PathLoss) -> usize {
    match p {
        PathLoss::Unbounded => 0,
        PathLoss::Bounded => 1,
    }
}

fn as_index(a: Association) -> usize {
    match a {
        Association::Rss => 0,
        Association::MaxSinr => 1,
    }
}

struct Drop {
    tier: usize,
    dist: f64,
    gain: f64,
}

/// `L(r)` with integer-exponent fast paths.
#[derive(Clone, Copy)]
struct Gain {
    alpha: f64,
    int_alpha: Option<i32>,
}

impl Gain {
    fn new(alpha: f64) -> Self {
        let int_alpha = (alpha.fract() == 0.0 && alpha <= 16.0).then_some(alpha as i32);
        Gain { alpha, int_alpha }
    }

    #[inline]
    fn at(self, pathloss: PathLoss, r: f64) -> f64 {
        let base = match pathloss {
            PathLoss::Unbounded => r,
            PathLoss::Bounded => 1.0 + r,
        };
        match self.int_alpha {
            Some(n) => base.powi(-n),
            None => base.powf(-self.alpha),
        }
    }
}

struct Engine<'a> {
    net: &'a NetworkConfig,
    radius: f64,
    samplers: Vec<Sampler>,
    counts: Vec<Poisson<f64>>,
    far: [f64; 2],
    gain: Gain,
}

impl<'a> Engine<'a> {
    fn new(net: &'a NetworkConfig, radius: f64) -> Result<Self> {
        let samplers = net.tiers.iter().map(|t| t.fading.sampler()).collect::<std::result::Result<Vec<_>, _>>()?;
        let counts = net
            .tiers
            .iter()
            .map(|t| Poisson::new(t.lambda * PI * radius * radius))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| SimError::InvalidConfig(format!("expected BS count: {e}")))?;
        let far = [far_mean(net, PathLoss::Unbounded, radius), far_mean(net, PathLoss::Bounded, radius)];
        Ok(Engine { net, radius, samplers, counts, far, gain: Gain::new(net.alpha) })
    }

    fn drop_network<R: Rng>(&self, rng: &mut R, buf: &mut Vec<Drop>) {
        buf.clear();
        for (j, count) in self.counts.iter().enumerate() {
            let n = count.sample(rng) as usize;
            for _ in 0..n {
                let dist = self.radius * rng.random::<f64>().sqrt();
                let gain = self.samplers[j].draw(rng);
                buf.push(Drop { tier: j, dist, gain });
            }
        }
    }

    fn judge(&self, drops: &[Drop], tally: &mut Tally, strongest: &mut [f64]) {
        let net = self.net;
        for (pi, pathloss) in [PathLoss::Unbounded, PathLoss::Bounded].into_iter().enumerate() {
            let mut total = self.far[pi];
            strongest.iter_mut().for_each(|v| *v = 0.0);
            // RSS: strongest average power, fading ignored
            let mut rss_best = (f64::NEG_INFINITY, usize::MAX, 0.0);
            for d in drops {
                let t = &net.tiers[d.tier];
                let mean_rx = t.power * self.gain.at(pathloss, d.dist);
                let rx = mean_rx * d.gain;
                total += rx;
                if rx > strongest[d.tier] {
                    strongest[d.tier] = rx;
                }
                if mean_rx > rss_best.0 {
                    rss_best = (mean_rx, d.tier, rx);
                }
            }
            if rss_best.1 != usize::MAX {
                let k = rss_best.1;
                tally.served[pi][k] += 1;
                let t = &net.tiers[k];
                if rss_best.2 >= t.beta * (total - rss_best.2 + t.noise) {
                    tally.covered[pi][0] += 1;
                }
            }
            // Max-SINR: SINR is increasing in the received power within a
            // tier, so each tier's strongest BS decides for that tier.
            let covered = net.tiers.iter().enumerate().any(|(j, t)| {
                let s = strongest[j];
                s > 0.0 && s >= t.beta * (total - s + t.noise)
            });
            if covered {
                tally.covered[pi][1] += 1;
            }
        }
    }

    fn judge_conditional<R: Rng>(&self, rng: &mut R, pathloss: PathLoss, k: usize, r: f64) -> bool {
        let net = self.net;
        let half_delta = 0.5 * net.delta();
        let tk = &net.tiers[k];
        let mut total = self.far[pl_index(pathloss)];
        for (j, t) in net.tiers.iter().enumerate() {
            let scale = (t.power / tk.power).powf(half_delta);
            let inner = match pathloss {
                PathLoss::Unbounded => r * scale,
                PathLoss::Bounded => ((1.0 + r) * scale - 1.0).max(0.0),
            };
            if inner >= self.radius {
                continue;
            }
            let area = PI * (self.radius * self.radius - inner * inner);
            let n = Poisson::new(t.lambda * area).map(|p| p.sample(rng) as usize).unwrap_or(0);
            for _ in 0..n {
                let u: f64 = rng.random();
                let dist = (inner * inner + u * (self.radius * self.radius - inner * inner)).sqrt();
                total += t.power * self.gain.at(pathloss, dist) * self.samplers[j].draw(rng);
            }
        }
        let signal = tk.power * self.gain.at(pathloss, r) * self.samplers[k].draw(rng);
        signal >= tk.beta * (total + tk.noise)
    }
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs trials `[first, first + count)` and tallies every association and
/// path-loss combination from the same draws.
pub fn run_trials(net: &NetworkConfig, radius: f64, seed: u64, first: u64, count: u64) -> Result<Tally> {
    let engine = Engine::new(net, radius)?;
    let tiers = net.tiers.len();
    let chunks = count.div_ceil(CHUNK);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = first + c * CHUNK;
            let hi = (lo + CHUNK).min(first + count);
            let mut tally = Tally::new(tiers);
            let mut buf = Vec::new();
            let mut strongest = vec![0.0; tiers];
            for i in lo..hi {
                let mut rng = stream(seed, i);
                engine.drop_network(&mut rng, &mut buf);
                engine.judge(&buf, &mut tally, &mut strongest);
                tally.trials += 1;
            }
            tally
        })
        .reduce(|| Tally::new(tiers), Tally::merge);
    Ok(tally)
}

/// Half-width the run is designed for: the requested one, or the widest
/// interval the trial count can produce.
fn design_halfwidth(sc: &SimConfig) -> f64 {
    sc.target_halfwidth.unwrap_or_else(|| ci99(0.5, sc.trials))
}

fn resolve_window(sc: &SimConfig) -> Result<f64> {
    let net = &sc.network;
    net.validate().map_err(|e| SimError::InvalidConfig(e.to_string()))?;
    if sc.trials == 0 {
        return Err(SimError::InvalidConfig("at least one trial is required".into()));
    }
    let radius = match sc.window_radius {
        Some(r) if r.is_finite() && r > 0.0 => r,
        Some(r) => return Err(SimError::InvalidConfig(format!("window radius must be positive, got {r}"))),
        None => default_window(net, design_halfwidth(sc)),
    };
    if let Some(r) = sc.conditional_distance {
        if !(r.is_finite() && r >= 0.0 && r < radius) {
            return Err(SimError::InvalidConfig(format!("conditional distance {r} must lie in [0, window radius)")));
        }
        if sc.serving_tier >= net.tiers.len() {
            return Err(SimError::InvalidConfig(format!("serving tier {} out of range", sc.serving_tier)));
        }
    }
    let eps = far_field_share(net, radius);
    let halfwidth = design_halfwidth(sc);
    if eps * eps > 0.1 * halfwidth {
        return Err(SimError::WindowTooSmall { radius, bias: eps * eps, halfwidth });
    }
    Ok(radius)
}

fn bias_bound(net: &NetworkConfig, radius: f64) -> f64 {
    far_field_share(net, radius).powi(2)
}

/// Estimates coverage of `sc.network` under `sc.association`, for the path
/// loss configured in the network.
pub fn estimate_coverage(sc: &SimConfig) -> Result<SimEstimate> {
    if sc.conditional_distance.is_some() {
        return estimate_conditional(sc);
    }
    let radius = resolve_window(sc)?;
    let net = &sc.network;
    let pathloss = net.pathloss;
    let mut tally = run_trials(net, radius, sc.seed, 0, sc.trials)?;
    loop {
        let p = tally.coverage(pathloss, sc.association);
        let hw = ci99(p, tally.trials);
        let done = sc.target_halfwidth.map(|t| hw <= t).unwrap_or(true);
        if done || tally.trials >= sc.max_trials {
            break;
        }
        let more = tally.trials.min(sc.max_trials - tally.trials);
        let extra = run_trials(net, radius, sc.seed, tally.trials, more)?;
        tally = tally.merge(extra);
    }
    let p = tally.coverage(pathloss, sc.association);
    let hw = ci99(p, tally.trials);
    let bias = bias_bound(net, radius);
    let served = &tally.served[pl_index(pathloss)];
    Ok(SimEstimate {
        coverage: p,
        ci99_halfwidth: hw,
        trials_used: tally.trials,
        association_shares: served.iter().map(|&c| c as f64 / tally.trials as f64).collect(),
        window_radius: radius,
        truncation_bias: bias,
        seed: sc.seed,
        association: sc.association,
        pathloss,
    })
}

/// Coverage given a serving BS of `sc.serving_tier` pinned at
/// `sc.conditional_distance`, with interferers restricted to the region
/// consistent with that BS being the RSS choice.
pub fn estimate_conditional(sc: &SimConfig) -> Result<SimEstimate> {
    let r = sc
        .conditional_distance
        .ok_or_else(|| SimError::InvalidConfig("conditional estimate needs a serving distance".into()))?;
    if sc.association != Association::Rss {
        return Err(SimError::InvalidConfig("conditional estimates are defined for RSS association".into()));
    }
    let radius = resolve_window(sc)?;
    let net = &sc.network;
    let engine = Engine::new(net, radius)?;
    let k = sc.serving_tier;
    let count_range = |first: u64, count: u64| -> u64 {
        let chunks = count.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let lo = first + c * CHUNK;
                let hi = (lo + CHUNK).min(first + count);
                (lo..hi).filter(|&i| engine.judge_conditional(&mut stream(sc.seed, i), net.pathloss, k, r)).count() as u64
            })
            .sum()
    };
    let mut trials = sc.trials;
    let mut hits = count_range(0, trials);
    loop {
        let hw = ci99(hits as f64 / trials as f64, trials);
        if sc.target_halfwidth.map(|t| hw <= t).unwrap_or(true) || trials >= sc.max_trials {
            break;
        }
        let more = trials.min(sc.max_trials - trials);
        hits += count_range(trials, more);
        trials += more;
    }
    let p = hits as f64 / trials as f64;
    let hw = ci99(p, trials);
    let bias = bias_bound(net, radius);
    Ok(SimEstimate {
        coverage: p,
        ci99_halfwidth: hw,
        trials_used: trials,
        association_shares: Vec::new(),
        window_radius: radius,
        truncation_bias: bias,
        seed: sc.seed,
        association: sc.association,
        pathloss: net.pathloss,
    })
}

/// All four association × path-loss estimates from one batch of trials.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SimBatch {
    pub trials: u64,
    pub window_radius: f64,
    pub seed: u64,
    pub estimates: Vec<SimEstimate>,
}

/// Runs `trials` trials once and reports every combination. The window is
/// sized for the requested trial count unless `window_radius` is given.
pub fn estimate_all(net: &NetworkConfig, trials: u64, seed: u64, window_radius: Option<f64>) -> Result<SimBatch> {
    let mut sc = SimConfig::new(net.clone(), Association::Rss, trials, seed);
    sc.window_radius = window_radius;
    let radius = resolve_window(&sc)?;
    let tally = run_trials(net, radius, seed, 0, trials)?;
    let mut estimates = Vec::with_capacity(4);
    for pathloss in [PathLoss::Unbounded, PathLoss::Bounded] {
        for association in [Association::Rss, Association::MaxSinr] {
            let p = tally.coverage(pathloss, association);
            let hw = ci99(p, tally.trials);
            let bias = bias_bound(net, radius);
            estimates.push(SimEstimate {
                coverage: p,
                ci99_halfwidth: hw,
                trials_used: tally.trials,
                association_shares: tally.served[pl_index(pathloss)].iter().map(|&c| c as f64 / trials as f64).collect(),
                window_radius: radius,
                truncation_bias: bias,
                seed,
                association,
                pathloss,
            });
        }
    }
    Ok(SimBatch { trials, window_radius: radius, seed, estimates })
}
