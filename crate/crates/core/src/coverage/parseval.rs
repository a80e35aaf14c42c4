//! Mellin–Parseval pairing `C = (1/2πi) ∫_{γ} ω(s) M_J(s) ds`.
//!
//! `M_J` is the Mellin transform of a real function `J(ξ)` known only by
//! point evaluation. `J` is split as
//!
//! ```text
//! J(ξ) = J₀ e^{−ξ} + A ξ^{−d} (1 − e^{−ξ}) + R(ξ)
//! ```
//!
//! so that `M_J(s) = J₀ Γ(s) − A Γ(s − d) + M_R(s)` with `R` small at both
//! ends; `M_R` is the trapezoid rule in `u = ln ξ`, which converges
//! geometrically for integrands analytic in a strip around the real `u` axis.

use super::{CoverageError, Result};
use crate::fading::FoxHDistribution;
use crate::quad::{integrate, QuadOptions};
use crate::special::ln_gamma;
use num_complex::Complex64;
use std::f64::consts::PI;

const STEP: f64 = 0.1;
const SCAN: f64 = 1.0;
const U_LIMIT: f64 = 90.0;
// Aliasing of the trapezoid rule sets in near t = π / STEP.
const T_MAX: f64 = 0.8 * PI / STEP;

/// `J` sampled on a uniform `ln ξ` grid, with its analytic parts.
pub(crate) struct MellinJ {
    gamma: f64,
    u0: f64,
    residual: Vec<f64>,
    j0: f64,
    tail: Option<(f64, f64)>,
    floor: f64,
    pub evaluations: usize,
}

impl MellinJ {
    /// Samples `j` where `e^{γu} |R(e^u)|` is not negligible.
    pub fn sample<F: FnMut(f64) -> f64>(mut j: F, j0: f64, tail: Option<(f64, f64)>, gamma: f64) -> Result<Self> {
        let mut evaluations = 0;
        let mut weighted = |u: f64| -> Result<f64> {
            let xi = u.exp();
            let v = j(xi);
            evaluations += 1;
            if !v.is_finite() {
                return Err(CoverageError::Numerical(format!("J({xi}) = {v}")));
            }
            let mut r = v - j0 * (-xi).exp();
            if let Some((a, d)) = tail {
                r -= a * xi.powf(-d) * (-(-xi).exp_m1());
            }
            Ok(r)
        };
        // Coarse scan fixes the window.
        let mut coarse = Vec::new();
        let mut u = -U_LIMIT;
        while u <= U_LIMIT {
            let r = weighted(u)?;
            coarse.push((u, (gamma * u).exp() * r.abs()));
            u += SCAN;
        }
        let peak = coarse.iter().map(|c| c.1).fold(0.0, f64::max);
        let significant: Vec<f64> = coarse.iter().filter(|c| c.1 > 1e-18 * peak).map(|c| c.0).collect();
        let (lo, hi) = match (significant.first(), significant.last()) {
            (Some(&a), Some(&b)) if peak > 0.0 => (a - 2.0 * SCAN, b + 2.0 * SCAN),
            _ => (0.0, 0.0),
        };
        let n = ((hi - lo) / STEP).round() as usize + 1;
        let mut residual = Vec::with_capacity(n);
        let mut abs_sum = 0.0;
        for i in 0..n {
            let u = lo + STEP * i as f64;
            let r = if peak > 0.0 { weighted(u)? } else { 0.0 };
            abs_sum += (gamma * u).exp() * r.abs();
            residual.push(r);
        }
        let floor = 1e-15 * STEP * abs_sum + 1e-18 * peak;
        Ok(MellinJ { gamma, u0: lo, residual, j0, tail, floor, evaluations })
    }

    /// `M_J(s) = ∫₀^∞ ξ^{s−1} J(ξ) dξ` on `Re s = γ`, excluding the
    /// `J₀ Γ(s) − A Γ(s − d)` part.
    fn residual_transform(&self, t: f64) -> Complex64 {
        let s = Complex64::new(self.gamma, t);
        // e^{s u} advanced by a fixed rotation per node
        let step = (s * STEP).exp();
        let mut w = (s * self.u0).exp();
        let mut acc = Complex64::new(0.0, 0.0);
        for &r in &self.residual {
            acc += w * r;
            w *= step;
        }
        acc * STEP
    }
}

/// `ln E[h^s]` for complex `s` inside the moment strip.
pub(crate) fn ln_moment(dist: &FoxHDistribution, s: Complex64) -> Complex64 {
    let h = &dist.h;
    let w = s + 1.0;
    Complex64::new(h.kappa().ln(), 0.0) - w * h.scale().ln() + h.ln_theta(w)
}

/// `(1/π) ∫₀^∞ Re[ω(γ+it) M_J(γ+it)] dt` for `ω = exp(ln_omega)`.
///
/// Returns value, absolute error estimate, integrand evaluations and the
/// truncation height.
pub(crate) fn pair<W: Fn(Complex64) -> Complex64>(ln_omega: W, mj: &MellinJ, tol: f64) -> Result<(f64, f64, usize, f64)> {
    let gamma = mj.gamma;
    let integrand = |t: f64| -> (f64, f64) {
        let s = Complex64::new(gamma, t);
        let lw = ln_omega(s);
        let mut total = (lw).exp() * mj.residual_transform(t);
        if mj.j0 != 0.0 {
            total += mj.j0 * (lw + ln_gamma(s)).exp();
        }
        if let Some((a, d)) = mj.tail {
            total -= a * (lw + ln_gamma(s - d)).exp();
        }
        (total.re, lw.re.exp() * mj.floor)
    };
    let mut value = 0.0;
    let mut err = 0.0;
    let mut evals = 0;
    let mut t0 = 0.0f64;
    let mut len = 1.0f64;
    let mut floor_prev = integrand(0.0).1;
    loop {
        let t1 = (t0 + len).min(T_MAX);
        let r = integrate(|t| integrand(t).0, t0, t1, QuadOptions::new(0.02 * tol, 1e-10).with_max_evals(20_000));
        evals += r.evaluations;
        value += r.value;
        err += r.abs_error;
        let (end, floor_end) = integrand(t1);
        err += 0.5 * (floor_prev + floor_end) * (t1 - t0);
        floor_prev = floor_end;
        t0 = t1;
        let small = end.abs().max(floor_end) * len < 0.01 * tol && r.value.abs() < 0.01 * tol;
        let drowned = end.abs() < floor_end && r.value.abs() < 10.0 * floor_end * len;
        if small || drowned {
            break;
        }
        if t1 >= T_MAX {
            err += end.abs() * len;
            break;
        }
        len *= 2.0;
    }
    Ok((value / PI, err / PI, evals, t0))
}
