//! Fox's H-function: representation, numerical evaluation and the transform
//! algebra the coverage expressions are assembled from.
//!
//! An [`HFunction`] stands for `x ↦ κ · H^{m,n}_{p,q}(c·x)` where
//!
//! ```text
//! H(z) = 1/(2πi) ∫_L θ(s) z^{-s} ds,
//! θ(s) = Π_{j≤m} Γ(b_j + B_j s) Π_{i≤n} Γ(1 - a_i - A_i s)
//!        / ( Π_{j>m} Γ(1 - b_j - B_j s) Π_{i>n} Γ(a_i + A_i s) ).
//! ```

mod algebra;
mod eval;

pub use algebra::TailExpansion;
pub use eval::{EvalMethod, HEval};

use crate::special::ln_gamma;
use num_complex::Complex64;
use std::fmt;
use thiserror::Error;

/// Default relative tolerance for H-function evaluation.
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FoxHError {
    #[error("invalid order (m={m}, n={n}, p={p}, q={q}): need m <= q and n <= p")]
    InvalidOrder { m: usize, n: usize, p: usize, q: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no convergence strip: left poles reach {lower}, right poles start at {upper}")]
    NoConvergenceStrip { lower: f64, upper: f64 },
    #[error("contour integration did not converge at x = {x} (error estimate {abs_error:e})")]
    QuadratureFailure { x: f64, abs_error: f64 },
    #[error("gamma pole at s = {s}: moment does not exist")]
    PoleHit { s: f64 },
    #[error("order s = {s} lies outside the Mellin strip ({lower}, {upper})")]
    MomentUndefined { s: f64, lower: f64, upper: f64 },
    #[error("asymptotic expansion at infinity needs n >= 1")]
    InapplicableExpansion,
    #[error("dominant poles at s = {s} coincide; only the simple-pole case is supported")]
    DominantPoleTie { s: f64 },
    #[error("argument must be positive, got {0}")]
    NonPositiveArgument(f64),
}

pub type Result<T> = std::result::Result<T, FoxHError>;

/// Order sequence `(m, n, p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct HOrder {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub q: usize,
}

impl HOrder {
    pub fn new(m: usize, n: usize, p: usize, q: usize) -> Result<Self> {
        if m > q || n > p {
            return Err(FoxHError::InvalidOrder { m, n, p, q });
        }
        Ok(HOrder { m, n, p, q })
    }
}

impl fmt::Display for HOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.m, self.n, self.p, self.q)
    }
}

/// Parameter sequence `(κ, c, a, b, A, B)`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HParams {
    pub kappa: f64,
    pub c: f64,
    pub a: Vec<f64>,
    pub a_scale: Vec<f64>,
    pub b: Vec<f64>,
    pub b_scale: Vec<f64>,
}

impl HParams {
    pub fn new(kappa: f64, c: f64, a: Vec<f64>, a_scale: Vec<f64>, b: Vec<f64>, b_scale: Vec<f64>) -> Self {
        HParams { kappa, c, a, a_scale, b, b_scale }
    }
}

/// Open interval of `Re s` separating the two pole families of `θ(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinStrip {
    pub lower: f64,
    pub upper: f64,
}

impl MellinStrip {
    pub fn contains(&self, s: f64) -> bool {
        s > self.lower && s < self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// A validated Fox H-function `x ↦ κ H^{m,n}_{p,q}(c x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HFunction {
    order: HOrder,
    params: HParams,
    strip: MellinStrip,
}

impl HFunction {
    pub fn new(order: HOrder, params: HParams) -> Result<Self> {
        let HOrder { m, n, p, q } = HOrder::new(order.m, order.n, order.p, order.q)?;
        let HParams { kappa, c, a, a_scale, b, b_scale } = &params;
        if a.len() != p || a_scale.len() != p {
            return Err(FoxHError::InvalidParams(format!("a and A must have length p = {p}")));
        }
        if b.len() != q || b_scale.len() != q {
            return Err(FoxHError::InvalidParams(format!("b and B must have length q = {q}")));
        }
        if !(c.is_finite() && *c > 0.0) {
            return Err(FoxHError::InvalidParams(format!("scale c must be positive, got {c}")));
        }
        if !kappa.is_finite() {
            return Err(FoxHError::InvalidParams("kappa must be finite".into()));
        }
        let all = a.iter().chain(b.iter()).chain(a_scale.iter()).chain(b_scale.iter());
        if all.clone().any(|v| !v.is_finite()) {
            return Err(FoxHError::InvalidParams("parameters must be finite".into()));
        }
        if a_scale.iter().chain(b_scale.iter()).any(|&v| v <= 0.0) {
            return Err(FoxHError::InvalidParams("all A_j and B_j must be positive".into()));
        }
        let lower = (0..m).map(|j| -b[j] / b_scale[j]).fold(f64::NEG_INFINITY, f64::max);
        let upper = (0..n).map(|i| (1.0 - a[i]) / a_scale[i]).fold(f64::INFINITY, f64::min);
        if !(lower < upper) || (m == 0 && n == 0) {
            return Err(FoxHError::NoConvergenceStrip { lower, upper });
        }
        Ok(HFunction { order: HOrder { m, n, p, q }, params, strip: MellinStrip { lower, upper } })
    }

    pub fn order(&self) -> HOrder {
        self.order
    }

    pub fn params(&self) -> &HParams {
        &self.params
    }

    pub fn strip(&self) -> MellinStrip {
        self.strip
    }

    pub fn kappa(&self) -> f64 {
        self.params.kappa
    }

    pub fn scale(&self) -> f64 {
        self.params.c
    }

    /// Same function with κ replaced.
    pub fn with_kappa(&self, kappa: f64) -> Self {
        let mut out = self.clone();
        out.params.kappa = kappa;
        out
    }

    /// `μ* = Σ_{j≤m} B_j + Σ_{i≤n} A_i − Σ_{j>m} B_j − Σ_{i>n} A_i`.
    ///
    /// The contour integrand decays like `exp(−π μ* |t| / 2)`.
    pub fn mu_star(&self) -> f64 {
        let HOrder { m, n, .. } = self.order;
        let p = &self.params;
        let bs: f64 = p.b_scale.iter().enumerate().map(|(j, &v)| if j < m { v } else { -v }).sum();
        let as_: f64 = p.a_scale.iter().enumerate().map(|(i, &v)| if i < n { v } else { -v }).sum();
        bs + as_
    }

    /// `Δ = Σ B_j − Σ A_i`; positive values make the left residue series entire.
    pub fn delta(&self) -> f64 {
        self.params.b_scale.iter().sum::<f64>() - self.params.a_scale.iter().sum::<f64>()
    }

    /// `ln θ(s)` on some branch; `exp` of it is the Mellin–Barnes kernel.
    pub fn ln_theta(&self, s: Complex64) -> Complex64 {
        self.ln_theta_skip(s, None)
    }

    // Skips one numerator gamma: `Some((true, j))` skips Γ(b_j + B_j s),
    // `Some((false, i))` skips Γ(1 - a_i - A_i s). Used for residues.
    pub(crate) fn ln_theta_skip(&self, s: Complex64, skip: Option<(bool, usize)>) -> Complex64 {
        let HOrder { m, n, .. } = self.order;
        let p = &self.params;
        let one = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..p.b.len() {
            if skip == Some((true, j)) {
                continue;
            }
            let z = p.b[j] + p.b_scale[j] * s;
            if j < m {
                acc += ln_gamma(z);
            } else {
                acc -= ln_gamma(one - z);
            }
        }
        for i in 0..p.a.len() {
            if skip == Some((false, i)) {
                continue;
            }
            let z = p.a[i] + p.a_scale[i] * s;
            if i < n {
                acc += ln_gamma(one - z);
            } else {
                acc -= ln_gamma(z);
            }
        }
        acc
    }

    /// Evaluates `κ H(c x)` to relative tolerance `tol`.
    pub fn eval(&self, x: f64, tol: f64) -> Result<HEval> {
        eval::evaluate(self, x, tol)
    }

    /// Evaluates on the Mellin–Barnes contour even where a residue series
    /// would be chosen; an independent second route.
    pub fn eval_contour(&self, x: f64, tol: f64) -> Result<HEval> {
        eval::evaluate_contour(self, x, tol)
    }

    /// Shorthand for `eval(x, DEFAULT_TOL).value`.
    pub fn value(&self, x: f64) -> Result<f64> {
        Ok(self.eval(x, DEFAULT_TOL)?.value)
    }
}

impl fmt::Display for HFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        write!(
            f,
            "H{} κ={} c={} a={:?} A={:?} b={:?} B={:?}",
            self.order, p.kappa, p.c, p.a, p.a_scale, p.b, p.b_scale
        )
    }
}

/// `κ · H^{m,n}_{p,q}(c·x)` with relative tolerance `tol`.
pub fn eval_h(h: &HFunction, x: f64, tol: f64) -> Result<f64> {
    Ok(h.eval(x, tol)?.value)
}

pub use algebra::{asymptotic_tail, h_transform_compose, inv_laplace_params, mellin_moment, reduce, tail_expansion};

/// `e^{-x}` as `H^{1,0}_{0,1}(x | −; (0, 1))`.
pub fn exponential() -> HFunction {
    HFunction::new(HOrder { m: 1, n: 0, p: 0, q: 1 }, HParams::new(1.0, 1.0, vec![], vec![], vec![0.0], vec![1.0]))
        .expect("valid exponential parameterisation")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_invariants() {
        assert!(HOrder::new(2, 0, 0, 1).is_err());
        assert!(HOrder::new(0, 2, 1, 0).is_err());
        assert!(HOrder::new(1, 1, 1, 1).is_ok());
    }

    #[test]
    fn parameter_lengths_checked() {
        let r = HFunction::new(HOrder { m: 1, n: 0, p: 0, q: 1 }, HParams::new(1.0, 1.0, vec![], vec![], vec![], vec![]));
        assert!(matches!(r, Err(FoxHError::InvalidParams(_))));
        let r = HFunction::new(HOrder { m: 1, n: 0, p: 0, q: 1 }, HParams::new(1.0, 1.0, vec![], vec![], vec![0.0], vec![-1.0]));
        assert!(matches!(r, Err(FoxHError::InvalidParams(_))));
    }

    #[test]
    fn overlapping_pole_families_rejected() {
        // left pole at s = -b/B = 2, right pole at (1-a)/A = 1
        let r = HFunction::new(
            HOrder { m: 1, n: 1, p: 1, q: 1 },
            HParams::new(1.0, 1.0, vec![0.0], vec![1.0], vec![-2.0], vec![1.0]),
        );
        assert!(matches!(r, Err(FoxHError::NoConvergenceStrip { .. })));
    }

    #[test]
    fn strip_of_exponential() {
        let h = exponential();
        assert_eq!(h.strip().lower, 0.0);
        assert!(h.strip().upper.is_infinite());
        assert_eq!(h.mu_star(), 1.0);
    }
}
