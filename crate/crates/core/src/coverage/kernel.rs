//! Interference kernels.
//!
//! `g_ε(a) = ε ∫₀¹ (1 − e^{−a t}) t^{−ε−1} dt` is the per-interferer
//! Laplace exponent after integrating over an exclusion region, and
//! `ρ_ε(ξ) = E_h[g_ε(ξ h)]` is its fading average. `g_ε` is the H-function
//! `ε H^{1,2}_{2,3}(a | (1,1),(1+ε,1) ; (1,1),(0,1),(ε,1))`, so `ρ_ε` is an
//! H-transform of the fading density.

use super::{CoverageError, Result};
use crate::fading::FoxHDistribution;
use crate::fox_h::{h_transform_compose, mellin_moment, HFunction, HOrder, HParams};
use crate::special::gamma;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// `g_ε` as an H-function. Mellin transform `εΓ(1+s)/(s(s+ε))` on `(−1, −ε)`.
pub fn interference_kernel(eps: f64) -> Result<HFunction> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(CoverageError::InvalidConfig(format!("kernel exponent must lie in (0,1), got {eps}")));
    }
    Ok(HFunction::new(
        HOrder { m: 1, n: 2, p: 2, q: 3 },
        HParams::new(eps, 1.0, vec![1.0, 1.0 + eps], vec![1.0, 1.0], vec![1.0, 0.0, eps], vec![1.0; 3]),
    )?)
}

const STEP: f64 = 0.05;
const LN_XI_MIN: f64 = -13.815_510_557_964_274; // ln 1e-6
const LN_XI_MAX: f64 = 20.723_265_836_946_41; // ln 1e9

/// `ρ_ε(ξ)` tabulated on a uniform grid in `ln ξ`, interpolated in log-log
/// coordinates and continued by the two leading asymptotic terms outside.
#[derive(Debug)]
pub struct RhoTable {
    eps: f64,
    ln_rho: Vec<f64>,
    // ρ ≈ large_coef · ξ^ε − 1 as ξ → ∞
    large_coef: f64,
    // ρ ≈ small_coef · ξ as ξ → 0, NaN when the fading mean is infinite
    small_coef: f64,
    pub h_evaluations: usize,
}

impl RhoTable {
    pub fn build(dist: &FoxHDistribution, eps: f64) -> Result<Self> {
        let kernel = interference_kernel(eps)?;
        let composed = h_transform_compose(&dist.h, &kernel)?;
        let large_coef = gamma(1.0 - eps) * mellin_moment(&dist.h, eps)?;
        let small_coef = mellin_moment(&dist.h, 1.0).map_or(f64::NAN, |m| eps / (1.0 - eps) * m);
        let n = ((LN_XI_MAX - LN_XI_MIN) / STEP).round() as usize + 1;
        let mut ln_rho = Vec::with_capacity(n);
        for i in 0..n {
            let xi = (LN_XI_MIN + STEP * i as f64).exp();
            let v = composed.eval(1.0 / xi, 1e-11)?.value / xi;
            if !(v > 0.0) {
                return Err(CoverageError::Numerical(format!("ρ_{eps}({xi}) evaluated to {v}")));
            }
            ln_rho.push(v.ln());
        }
        Ok(RhoTable { eps, ln_rho, large_coef, small_coef, h_evaluations: n })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `Γ(1−ε) E[h^ε]`, the coefficient of `ξ^ε` at infinity.
    pub fn large_coef(&self) -> f64 {
        self.large_coef
    }

    pub fn value(&self, xi: f64) -> f64 {
        if xi <= 0.0 {
            return 0.0;
        }
        let u = xi.ln();
        let n = self.ln_rho.len();
        if u <= LN_XI_MIN {
            let (xi0, rho0) = (LN_XI_MIN.exp(), self.ln_rho[0].exp());
            if !self.small_coef.is_finite() {
                return xi * rho0 / xi0;
            }
            // exact linear term, quadratic remainder matched at the first node
            let r = xi / xi0;
            return self.small_coef * xi + (rho0 - self.small_coef * xi0) * r * r;
        }
        if u >= LN_XI_MAX {
            return self.large_coef * xi.powf(self.eps) - 1.0;
        }
        let x = (u - LN_XI_MIN) / STEP;
        let i = (x.floor() as usize).clamp(1, n - 3);
        let t = x - i as f64;
        // 4-point Lagrange on nodes i-1..i+2 at offsets -1, 0, 1, 2
        let (y0, y1, y2, y3) = (self.ln_rho[i - 1], self.ln_rho[i], self.ln_rho[i + 1], self.ln_rho[i + 2]);
        let l0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let l1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let l2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let l3 = (t + 1.0) * t * (t - 1.0) / 6.0;
        (l0 * y0 + l1 * y1 + l2 * y2 + l3 * y3).exp()
    }
}

type Key = (Vec<u64>, u64);

fn key(dist: &FoxHDistribution, eps: f64) -> Key {
    let o = dist.h.order();
    let p = dist.h.params();
    let mut bits: Vec<u64> = [o.m, o.n, o.p, o.q].iter().map(|&v| v as u64).collect();
    bits.extend([p.kappa, p.c].iter().chain(&p.a).chain(&p.a_scale).chain(&p.b).chain(&p.b_scale).map(|v| v.to_bits()));
    (bits, eps.to_bits())
}

type Cell = Arc<OnceLock<std::result::Result<Arc<RhoTable>, CoverageError>>>;

/// Process-wide table cache keyed by the exact fading parameters and `ε`.
/// Concurrent callers of the same key share one build.
pub fn rho_table(dist: &FoxHDistribution, eps: f64) -> Result<Arc<RhoTable>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Cell>>> = OnceLock::new();
    let cell = {
        let mut map = CACHE.get_or_init(Default::default).lock().unwrap_or_else(|e| e.into_inner());
        map.entry(key(dist, eps)).or_default().clone()
    };
    cell.get_or_init(|| RhoTable::build(dist, eps).map(Arc::new)).clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fading::{make_distribution, FadingSpec};
    use crate::quad::{integrate, QuadOptions};

    // ε a^ε ∫₀^a (1 − e^{−t}) t^{−ε−1} dt
    fn g_quadrature(eps: f64, a: f64) -> f64 {
        let r = integrate(|t| -(-t).exp_m1() * t.powf(-eps - 1.0), 0.0, a, QuadOptions::new(0.0, 1e-13));
        eps * a.powf(eps) * r.value
    }

    #[test]
    fn kernel_matches_quadrature() {
        for &eps in &[0.25, 0.5, 0.8] {
            let g = interference_kernel(eps).unwrap();
            for &a in &[1e-4, 0.03, 0.7, 3.0, 25.0, 400.0] {
                let want = g_quadrature(eps, a);
                let got = g.eval(a, 1e-11).unwrap().value;
                assert!(((got - want) / want).abs() < 1e-9, "eps={eps} a={a}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn rayleigh_rho_closed_form() {
        // for exponential h: ρ_ε(ξ) = ξ^ε ∫_{ξ^{-ε}}^∞ du / (1 + u^{1/ε})
        let d = make_distribution(&FadingSpec::Rayleigh).unwrap();
        let eps = 0.5;
        let t = rho_table(&d, eps).unwrap();
        for &xi in &[1e-7f64, 1e-3, 0.2, 1.0, 9.0, 300.0, 1e6, 1e10] {
            let lo = xi.powf(-eps);
            let r = crate::quad::integrate_to_infinity(|u| 1.0 / (1.0 + u * u), lo, QuadOptions::new(0.0, 1e-13));
            let want = xi.powf(eps) * r.value;
            let got = t.value(xi);
            assert!(((got - want) / want).abs() < 1e-7, "xi={xi}: {got} vs {want}");
        }
    }
}
