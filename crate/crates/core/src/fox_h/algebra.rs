//! Mellin moments, the large-argument expansion, H-transform composition,
//! the inverse-Laplace parameter map and pair cancellation.

use super::{FoxHError, HFunction, HOrder, HParams, Result};
use crate::special::is_gamma_pole;
use num_complex::Complex64;

/// `∫₀^∞ x^s · κ H(c x) dx = κ c^{-(s+1)} θ(s+1)`, evaluated as a gamma
/// product. For a density this is `E[X^s]`.
pub fn mellin_moment(h: &HFunction, s: f64) -> Result<f64> {
    let w = s + 1.0;
    let HOrder { m, n, .. } = h.order;
    let p = &h.params;
    let mut args = Vec::with_capacity(p.a.len() + p.b.len());
    for j in 0..h.order.q {
        let z = p.b[j] + p.b_scale[j] * w;
        if j < m {
            args.push((true, z));
        } else {
            args.push((false, 1.0 - z));
        }
    }
    for i in 0..h.order.p {
        let z = p.a[i] + p.a_scale[i] * w;
        if i < n {
            args.push((true, 1.0 - z));
        } else {
            args.push((false, z));
        }
    }
    if args.iter().any(|&(num, z)| num && is_gamma_pole(Complex64::new(z, 0.0))) {
        return Err(FoxHError::PoleHit { s });
    }
    if !h.strip.contains(w) {
        return Err(FoxHError::MomentUndefined { s, lower: h.strip.lower - 1.0, upper: h.strip.upper - 1.0 });
    }
    let lt = h.ln_theta(Complex64::new(w, 0.0));
    let mag = (lt.re - w * p.c.ln()).exp();
    let sign = if ((lt.im / std::f64::consts::PI).round() as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok(p.kappa * sign * mag)
}

/// Leading behaviour `κ η (c x)^d` of an H-function as `x → ∞`, from the
/// left-most pole of the `Γ(1 − a_i − A_i s)` family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailExpansion {
    pub d: f64,
    pub eta: f64,
    pub kappa: f64,
    pub c: f64,
}

impl TailExpansion {
    pub fn value(&self, x: f64) -> f64 {
        self.kappa * self.eta * (self.c * x).powf(self.d)
    }
}

pub fn tail_expansion(h: &HFunction) -> Result<TailExpansion> {
    let n = h.order.n;
    if n == 0 {
        return Err(FoxHError::InapplicableExpansion);
    }
    let p = &h.params;
    let poles: Vec<f64> = (0..n).map(|i| (1.0 - p.a[i]) / p.a_scale[i]).collect();
    let (i_star, s_star) = poles
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    for (i, &s) in poles.iter().enumerate() {
        if i != i_star {
            let k = (s_star - s) * p.a_scale[i];
            if k > -1e-12 && (k - k.round()).abs() < 1e-10 {
                return Err(FoxHError::DominantPoleTie { s: s_star });
            }
        }
    }
    // Residue of Γ(1 − a − A s) at s* is −1/A; closing to the right flips the sign.
    let lt = h.ln_theta_skip(Complex64::new(s_star, 0.0), Some((false, i_star)));
    let sign = if ((lt.im / std::f64::consts::PI).round() as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let eta = sign * lt.re.exp() / p.a_scale[i_star];
    Ok(TailExpansion { d: -s_star, eta, kappa: p.kappa, c: p.c })
}

/// Leading-order approximation of `κ H(c x)` for large `x`.
pub fn asymptotic_tail(h: &HFunction, x: f64) -> Result<f64> {
    Ok(tail_expansion(h)?.value(x))
}

/// Parameters of `s ↦ s·∫₀^∞ outer(t) inner(t s) dt` as a single H-function:
///
/// `∫₀^∞ outer(t) inner(t s) dt = (1/s) · composed(1/s)`.
///
/// Order of the result is `(m + n₁, n + m₁, p + q₁, q + p₁)`. The
/// numerator groups are placed first in each list so inner functions with
/// `m₁ < q₁` or `n₁ < p₁` are handled too.
pub fn h_transform_compose(outer: &HFunction, inner: &HFunction) -> Result<HFunction> {
    let HOrder { m, n, p, q } = outer.order;
    let HOrder { m: m1, n: n1, p: p1, q: q1 } = inner.order;
    let o = &outer.params;
    let i = &inner.params;
    let mut a = Vec::with_capacity(p + q1);
    let mut a_scale = Vec::with_capacity(p + q1);
    let mut b = Vec::with_capacity(q + p1);
    let mut b_scale = Vec::with_capacity(q + p1);
    let flip_b = |j: usize| (1.0 - i.b[j] - i.b_scale[j], i.b_scale[j]);
    let flip_a = |k: usize| (1.0 - i.a[k] - i.a_scale[k], i.a_scale[k]);
    // a: numerator part (inner b^{1:m1} flipped, outer a^{1:n}), then the rest
    for j in 0..m1 {
        let (v, s) = flip_b(j);
        a.push(v);
        a_scale.push(s);
    }
    a.extend_from_slice(&o.a[..n]);
    a_scale.extend_from_slice(&o.a_scale[..n]);
    a.extend_from_slice(&o.a[n..]);
    a_scale.extend_from_slice(&o.a_scale[n..]);
    for j in m1..q1 {
        let (v, s) = flip_b(j);
        a.push(v);
        a_scale.push(s);
    }
    // b: (outer b^{1:m}, inner a^{1:n1} flipped, outer b^{m+1:q}, inner a^{n1+1:p1} flipped)
    b.extend_from_slice(&o.b[..m]);
    b_scale.extend_from_slice(&o.b_scale[..m]);
    for k in 0..n1 {
        let (v, s) = flip_a(k);
        b.push(v);
        b_scale.push(s);
    }
    b.extend_from_slice(&o.b[m..]);
    b_scale.extend_from_slice(&o.b_scale[m..]);
    for k in n1..p1 {
        let (v, s) = flip_a(k);
        b.push(v);
        b_scale.push(s);
    }
    let order = HOrder { m: m + n1, n: n + m1, p: p + q1, q: q + p1 };
    let params = HParams::new(o.kappa * i.kappa / i.c, o.c / i.c, a, a_scale, b, b_scale);
    HFunction::new(order, params)
}

/// Parameter map for `L⁻¹{x^{-ρ} κ H(c x)}(t) = t^{ρ-1} · mapped(1/t)`.
///
/// The order becomes `(m, n, p+1, q)` and `(ρ, 1)` is appended to the
/// `(a, A)` list. The caller applies the `t^{ρ-1}` prefactor.
pub fn inv_laplace_params(h: &HFunction, rho: f64) -> Result<HFunction> {
    let HOrder { m, n, p, q } = h.order;
    let mut params = h.params.clone();
    params.a.push(rho);
    params.a_scale.push(1.0);
    HFunction::new(HOrder { m, n, p: p + 1, q }, params)
}

fn same(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-12 * (1.0 + x.abs().max(y.abs()))
}

/// Removes gamma pairs that cancel exactly: a numerator `Γ(b_j + B_j s)`
/// (`j ≤ m`) against a denominator `Γ(a_i + A_i s)` (`i > n`), and a
/// numerator `Γ(1 − a_i − A_i s)` (`i ≤ n`) against a denominator
/// `Γ(1 − b_j − B_j s)` (`j > m`).
pub fn reduce(h: &HFunction) -> HFunction {
    let mut cur = h.clone();
    loop {
        let HOrder { m, n, p, q } = cur.order;
        let pr = &cur.params;
        let mut hit = None;
        'outer: for j in 0..q {
            for i in 0..p {
                let pair = same(pr.b[j], pr.a[i]) && same(pr.b_scale[j], pr.a_scale[i]);
                if pair && ((j < m && i >= n) || (j >= m && i < n)) {
                    hit = Some((i, j));
                    break 'outer;
                }
            }
        }
        let Some((i, j)) = hit else { return cur };
        let mut params = pr.clone();
        params.a.remove(i);
        params.a_scale.remove(i);
        params.b.remove(j);
        params.b_scale.remove(j);
        let order = if j < m { HOrder { m: m - 1, n, p: p - 1, q: q - 1 } } else { HOrder { m, n: n - 1, p: p - 1, q: q - 1 } };
        match HFunction::new(order, params) {
            Ok(next) => cur = next,
            Err(_) => return cur,
        }
    }
}

impl HFunction {
    /// `x ↦ ∫₀^x κ H(c t) dt` as an H-function.
    pub fn integral_from_zero(&self) -> Result<HFunction> {
        let HOrder { m, n, p, q } = self.order;
        let pr = &self.params;
        let mut a = vec![1.0];
        let mut a_scale = vec![1.0];
        a.extend(pr.a.iter().zip(&pr.a_scale).map(|(&x, &s)| x + s));
        a_scale.extend_from_slice(&pr.a_scale);
        let mut b: Vec<f64> = pr.b.iter().zip(&pr.b_scale).map(|(&x, &s)| x + s).collect();
        let mut b_scale = pr.b_scale.clone();
        b.push(0.0);
        b_scale.push(1.0);
        HFunction::new(HOrder { m, n: n + 1, p: p + 1, q: q + 1 }, HParams::new(pr.kappa / pr.c, pr.c, a, a_scale, b, b_scale))
    }

    /// `x ↦ ∫ₓ^∞ κ H(c t) dt` as an H-function.
    pub fn integral_to_infinity(&self) -> Result<HFunction> {
        let HOrder { m, n, p, q } = self.order;
        let pr = &self.params;
        let mut a: Vec<f64> = pr.a.iter().zip(&pr.a_scale).map(|(&x, &s)| x + s).collect();
        let mut a_scale = pr.a_scale.clone();
        a.push(1.0);
        a_scale.push(1.0);
        let mut b = vec![0.0];
        let mut b_scale = vec![1.0];
        b.extend(pr.b.iter().zip(&pr.b_scale).map(|(&x, &s)| x + s));
        b_scale.extend_from_slice(&pr.b_scale);
        HFunction::new(HOrder { m: m + 1, n, p: p + 1, q: q + 1 }, HParams::new(pr.kappa / pr.c, pr.c, a, a_scale, b, b_scale))
    }
}
