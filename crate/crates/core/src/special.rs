//! Complex log-gamma and the handful of real special functions built on it.
//!
//! The Lanczos approximation (g = 7, nine terms) covers `Re z >= 0.5`; the
//! left half-plane goes through the reflection formula with a sine that is
//! evaluated in log form so large imaginary parts do not overflow.

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Returns true when `z` sits on a pole of the gamma function.
pub fn is_gamma_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// A branch of `ln Γ(z)`. Only `exp` of the result is meaningful for
/// arguments left of the imaginary axis, which is all the Mellin–Barnes
/// integrands need. Poles return `+∞`.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if is_gamma_pole(z) {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    if z.im < 0.0 {
        return ln_gamma(z.conj()).conj();
    }
    if z.re < 0.5 {
        // Γ(z) Γ(1 - z) = π / sin(πz)
        let ln_pi = Complex64::new(PI.ln(), 0.0);
        return ln_pi - ln_sin_pi(z) - ln_gamma_right(Complex64::new(1.0, 0.0) - z);
    }
    ln_gamma_right(z)
}

fn ln_gamma_right(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (z + 0.5) * t.ln() - t + x.ln() + HALF_LN_2PI
}

// ln sin(πz) for Im z >= 0, with the real part folded into [-1, 1].
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let folded = Complex64::new(z.re - 2.0 * (z.re / 2.0).round(), z.im);
    // sin(πz) = e^{-iπz} (1 - e^{2iπz}) · i/2
    let i = Complex64::new(0.0, 1.0);
    let w = (2.0 * i * PI * folded).exp();
    -i * PI * folded + (Complex64::new(1.0, 0.0) - w).ln() + Complex64::new(0.5f64.ln(), PI / 2.0)
}

/// `ln |Γ(x)|` together with the sign of `Γ(x)` for real `x`.
pub fn ln_gamma_real(x: f64) -> (f64, f64) {
    let lg = ln_gamma(Complex64::new(x, 0.0));
    if lg.re.is_infinite() {
        return (f64::INFINITY, 1.0);
    }
    // The imaginary part is a multiple of π: even → positive, odd → negative.
    let k = (lg.im / PI).round() as i64;
    let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    (lg.re, sign)
}

/// Real gamma function. Returns ±∞ at poles.
pub fn gamma(x: f64) -> f64 {
    let (l, s) = ln_gamma_real(x);
    s * l.exp()
}

/// Complex gamma function.
pub fn gamma_c(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// Regularised lower incomplete gamma `P(a, x)` for `a > 0`, `x >= 0`.
///
/// Series for `x < a + 1`, Lentz continued fraction otherwise.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let ln_pre = a * x.ln() - x - ln_gamma_real(a).0;
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..1000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                break;
            }
        }
        (sum * ln_pre.exp()).min(1.0)
    } else {
        1.0 - gamma_q_cf(a, x, ln_pre)
    }
}

fn gamma_q_cf(a: f64, x: f64, ln_pre: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    ln_pre.exp() * h
}

/// Regularised upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p(a, x)
    } else {
        let ln_pre = a * x.ln() - x - ln_gamma_real(a).0;
        gamma_q_cf(a, x, ln_pre)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn factorials() {
        let mut f = 1.0;
        for n in 1..25 {
            assert!(rel(gamma(n as f64), f) < 1e-13, "n = {n}");
            f *= n as f64;
        }
    }

    #[test]
    fn half_integers_and_negative_arguments() {
        let sqrt_pi = PI.sqrt();
        assert!(rel(gamma(0.5), sqrt_pi) < 1e-14);
        assert!(rel(gamma(1.5), sqrt_pi / 2.0) < 1e-14);
        assert!(rel(gamma(-0.5), -2.0 * sqrt_pi) < 1e-13);
        assert!(rel(gamma(-1.5), 4.0 * sqrt_pi / 3.0) < 1e-13);
        assert!(rel(gamma(-2.5), -8.0 * sqrt_pi / 15.0) < 1e-13);
        assert!(gamma(-3.0).is_infinite());
    }

    #[test]
    fn reflection_on_complex_plane() {
        // |Γ(iy)|² = π / (y sinh πy)
        for &y in &[0.3, 1.0, 5.0, 40.0, 150.0] {
            let g = ln_gamma(Complex64::new(0.0, y));
            let expected = 0.5 * (PI / (y * (PI * y).sinh())).ln();
            assert!((g.re - expected).abs() < 1e-12 * expected.abs().max(1.0), "y = {y}");
        }
        // |Γ(1/2 + iy)|² = π / cosh πy
        for &y in &[0.1, 2.0, 30.0] {
            let g = ln_gamma(Complex64::new(0.5, y));
            let expected = 0.5 * (PI / (PI * y).cosh()).ln();
            assert!((g.re - expected).abs() < 1e-12 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn recurrence_holds_off_axis() {
        for &(x, y) in &[(-3.7, 0.4), (-0.2, 12.0), (2.3, -7.5), (10.0, 60.0)] {
            let z = Complex64::new(x, y);
            let lhs = gamma_c(z + 1.0);
            let rhs = z * gamma_c(z);
            assert!((lhs - rhs).norm() < 1e-12 * rhs.norm(), "z = {z}");
        }
    }

    #[test]
    fn incomplete_gamma_limits() {
        assert!((gamma_p(1.0, 2.0) - (1.0 - (-2.0f64).exp())).abs() < 1e-14);
        assert!((gamma_q(1.0, 30.0) - (-30.0f64).exp()).abs() < 1e-25);
        assert!((gamma_p(2.5, 1.0) + gamma_q(2.5, 1.0) - 1.0).abs() < 1e-14);
    }
}
