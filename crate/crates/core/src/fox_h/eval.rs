//! Numerical evaluation: left residue series when the poles are simple and
//! the series is well conditioned, otherwise a vertical Mellin–Barnes
//! contour placed at the saddle point of the integrand inside the strip.

use super::{FoxHError, HFunction, Result};
use crate::quad::{integrate, QuadOptions};
use crate::special::ln_gamma_real;
use num_complex::Complex64;
use std::f64::consts::PI;

const SERIES_MAX_TERMS: usize = 400;
const CONTOUR_MAX_T: f64 = 2.0e4;
const CONTOUR_MAX_EVALS: usize = 400_000;

/// Which path produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMethod {
    ResidueSeries,
    Contour,
}

/// A value together with its error estimate and bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HEval {
    pub value: f64,
    pub abs_error: f64,
    pub method: EvalMethod,
    pub evaluations: usize,
    /// Abscissa of the contour (NaN for the series path).
    pub abscissa: f64,
    /// Truncation height of the contour (NaN for the series path).
    pub truncation: f64,
}

pub(super) fn evaluate(h: &HFunction, x: f64, tol: f64) -> Result<HEval> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(FoxHError::NonPositiveArgument(x));
    }
    let tol = if tol > 0.0 && tol < 1.0 { tol } else { super::DEFAULT_TOL };
    let ln_z = (h.params.c * x).ln();
    let series = residue_series(h, ln_z);
    if let Some(v) = series.filter(|v| v.abs_error <= 0.1 * tol * v.value.abs()) {
        return Ok(v);
    }
    match contour(h, ln_z, tol, x) {
        // A cancelling series still beats a contour that cannot converge.
        Err(e) => series.ok_or(e),
        ok => ok,
    }
}

// Whether the poles of one numerator family (`left`: Γ(b_j + B_j s), j < m;
// otherwise Γ(1 − a_i − A_i s), i < n) are all simple.
fn poles_simple(h: &HFunction, left: bool, kmax: usize) -> bool {
    let p = &h.params;
    let (count, off, scale) = if left { (h.order.m, &p.b, &p.b_scale) } else { (h.order.n, &p.a, &p.a_scale) };
    // Family j has poles where off_j + k = −scale_j s (left) or scale_j s − 1 (right);
    // in both cases `(off_j + k) / scale_j` up to sign and shift.
    let shift = |v: f64| if left { v } else { v - 1.0 };
    for j in 0..count {
        for l in (j + 1)..count {
            for k in 0..=kmax {
                let kl = scale[l] * (shift(off[j]) + k as f64) / scale[j] - shift(off[l]);
                if kl > -0.5 && (kl - kl.round()).abs() < 1e-9 * (1.0 + kl.abs()) {
                    return false;
                }
            }
        }
    }
    true
}

// ln of the radius `Π A_i^{-A_i} Π B_j^{B_j}` that separates the two
// convergent expansions when Δ = 0.
fn ln_radius(h: &HFunction) -> f64 {
    let p = &h.params;
    p.b_scale.iter().map(|&b| b * b.ln()).sum::<f64>() - p.a_scale.iter().map(|&a| a * a.ln()).sum::<f64>()
}

fn pick_series(h: &HFunction, ln_z: f64) -> Option<bool> {
    let delta = h.delta();
    let tiny = 1e-12;
    let left_ok = h.order.m > 0 && (delta > tiny || (delta.abs() <= tiny && ln_z < ln_radius(h) - 0.7));
    let right_ok = h.order.n > 0 && (delta < -tiny || (delta.abs() <= tiny && ln_z > ln_radius(h) + 0.7));
    match (left_ok, right_ok) {
        (true, _) => Some(true),
        (false, true) => Some(false),
        _ => None,
    }
}

/// Residue sum over one family of numerator poles: left of the strip when
/// the expansion in ascending powers of `z` converges, right of it otherwise.
pub(crate) fn residue_series(h: &HFunction, ln_z: f64) -> Option<HEval> {
    let left = pick_series(h, ln_z)?;
    if !poles_simple(h, left, SERIES_MAX_TERMS) {
        return None;
    }
    let p = &h.params;
    let count = if left { h.order.m } else { h.order.n };
    let mut sum = 0.0f64;
    let mut max_term = 0.0f64;
    let mut evaluations = 0;
    for j in 0..count {
        // pole s_k and the scale of the gamma argument in s
        let (scale, pole): (f64, Box<dyn Fn(usize) -> f64>) = if left {
            let (bj, bbj) = (p.b[j], p.b_scale[j]);
            (bbj, Box::new(move |k| -(bj + k as f64) / bbj))
        } else {
            let (ai, aai) = (p.a[j], p.a_scale[j]);
            (aai, Box::new(move |k| (1.0 - ai + k as f64) / aai))
        };
        let mut small_run = 0;
        let mut prev = f64::INFINITY;
        let mut done = false;
        for k in 0..SERIES_MAX_TERMS {
            let s = pole(k);
            let lt = h.ln_theta_skip(Complex64::new(s, 0.0), Some((left, j)));
            evaluations += 1;
            let ln_mag = lt.re - s * ln_z - ln_gamma_real(k as f64 + 1.0).0 - scale.ln();
            let term = if ln_mag == f64::NEG_INFINITY || lt.re == f64::NEG_INFINITY {
                0.0
            } else {
                let phase = lt.im + PI * k as f64;
                ln_mag.exp() * phase.cos()
            };
            if !term.is_finite() {
                return None;
            }
            sum += term;
            max_term = max_term.max(term.abs());
            let decreasing = term.abs() <= prev;
            prev = term.abs();
            if decreasing && term.abs() <= 1e-18 * sum.abs().max(1e-300) {
                small_run += 1;
                if small_run >= 3 {
                    done = true;
                    break;
                }
            } else {
                small_run = 0;
            }
        }
        if !done {
            return None;
        }
    }
    let value = sum * p.kappa;
    if sum == 0.0 {
        return None;
    }
    let cancellation = max_term / sum.abs();
    let rel_err = (cancellation + 1.0) * 4.0 * f64::EPSILON * 10.0;
    Some(HEval {
        value,
        abs_error: rel_err * value.abs(),
        method: EvalMethod::ResidueSeries,
        evaluations,
        abscissa: f64::NAN,
        truncation: f64::NAN,
    })
}

// Log-magnitude of the integrand at abscissa γ, measured slightly off the
// real axis so zeros of denominator gammas do not create spurious minima.
fn saddle_objective(h: &HFunction, gamma: f64, ln_z: f64) -> f64 {
    let v = h.ln_theta(Complex64::new(gamma, 0.5)).re - gamma * ln_z;
    if v.is_nan() { f64::INFINITY } else { v }
}

pub(crate) fn contour_abscissa(h: &HFunction, ln_z: f64) -> f64 {
    let strip = h.strip;
    let mut candidates = Vec::new();
    if strip.lower.is_finite() && strip.upper.is_finite() {
        let w = strip.width();
        let (lo, hi) = (strip.lower + 0.05 * w, strip.upper - 0.05 * w);
        for i in 0..=64 {
            candidates.push(lo + (hi - lo) * i as f64 / 64.0);
        }
    } else {
        let (anchor, dir) = if strip.lower.is_finite() { (strip.lower, 1.0) } else { (strip.upper, -1.0) };
        let mut off = 0.02;
        while off < 1e5 {
            candidates.push(anchor + dir * off);
            off *= 1.25;
        }
    }
    let vals: Vec<f64> = candidates.iter().map(|&g| saddle_objective(h, g, ln_z)).collect();
    let (best, _) = vals
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let lo_i = best.saturating_sub(1);
    let hi_i = (best + 1).min(candidates.len() - 1);
    let (mut a, mut b) = (candidates[lo_i], candidates[hi_i]);
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    // golden-section refinement
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let (mut fc, mut fd) = (saddle_objective(h, c, ln_z), saddle_objective(h, d, ln_z));
    for _ in 0..40 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = saddle_objective(h, c, ln_z);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = saddle_objective(h, d, ln_z);
        }
    }
    let g = 0.5 * (a + b);
    if fc.min(fd) <= vals[best] { g } else { candidates[best] }
}

fn contour(h: &HFunction, ln_z: f64, tol: f64, x: f64) -> Result<HEval> {
    let gamma = contour_abscissa(h, ln_z);
    let s0 = Complex64::new(gamma, 0.0);
    let log_peak = h.ln_theta(s0).re - gamma * ln_z;
    let log_peak = if log_peak.is_finite() { log_peak } else { saddle_objective(h, gamma, ln_z) };
    if !log_peak.is_finite() {
        return Err(FoxHError::QuadratureFailure { x, abs_error: f64::INFINITY });
    }
    // |integrand| ≤ e^{log_peak}; below the f64 range the value is zero.
    if log_peak + h.params.kappa.abs().ln() < -740.0 {
        return Ok(HEval {
            value: 0.0,
            abs_error: f64::MIN_POSITIVE,
            method: EvalMethod::Contour,
            evaluations: 0,
            abscissa: gamma,
            truncation: 0.0,
        });
    }
    let max_mag_cell = std::cell::Cell::new(0.0f64);
    let mut integrand = |t: f64| -> f64 {
        let s = Complex64::new(gamma, t);
        let w = h.ln_theta(s) - s * ln_z;
        let mag = (w.re - log_peak).exp();
        if !mag.is_finite() {
            return 0.0;
        }
        max_mag_cell.set(max_mag_cell.get().max(mag));
        mag * w.im.cos()
    };
    let mut total = 0.0f64;
    let mut total_err = 0.0f64;
    let mut evaluations = 0;
    let mut t0 = 0.0;
    let mut len = 2.0;
    let mut converged = false;
    while t0 < CONTOUR_MAX_T && evaluations < CONTOUR_MAX_EVALS {
        let t1 = t0 + len;
        let abs_tol = if total == 0.0 { 0.0 } else { 0.05 * tol * total.abs() };
        let r = integrate(&mut integrand, t0, t1, QuadOptions::new(abs_tol, 0.05 * tol).with_max_evals(40_000));
        evaluations += r.evaluations;
        total += r.value;
        total_err += r.abs_error;
        let end_mag = {
            let s = Complex64::new(gamma, t1);
            let w = h.ln_theta(s) - s * ln_z;
            (w.re - log_peak).exp()
        };
        t0 = t1;
        let max_mag = max_mag_cell.get();
        let scale = total.abs().max(1e-300);
        if end_mag.is_finite()
            && end_mag < 1e-3 * tol * max_mag.max(1.0)
            && r.value.abs() < 0.05 * tol * scale
            && end_mag * len < 0.05 * tol * scale
        {
            total_err += end_mag * len;
            converged = true;
            break;
        }
        len *= 2.0;
    }
    let max_mag = max_mag_cell.get();
    let prefactor = h.params.kappa * log_peak.exp() / PI;
    let value = total * prefactor;
    let abs_error = total_err * prefactor.abs();
    let floor = 1e-14 * max_mag.max(1.0) * prefactor.abs();
    if !converged || !(abs_error <= tol * value.abs() || abs_error <= floor) {
        return Err(FoxHError::QuadratureFailure { x, abs_error });
    }
    Ok(HEval { value, abs_error, method: EvalMethod::Contour, evaluations, abscissa: gamma, truncation: t0 })
}

/// Forces the contour path; used to cross-check the series.
pub(crate) fn evaluate_contour(h: &HFunction, x: f64, tol: f64) -> Result<HEval> {
    if !(x > 0.0) {
        return Err(FoxHError::NonPositiveArgument(x));
    }
    contour(h, (h.params.c * x).ln(), tol, x)
}
