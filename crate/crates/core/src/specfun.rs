//! The hypergeometric family `₂F₁(1, b; 1 + b; z)` for `z ≤ 0`, and a
//! quadrature route to the single-interferer geometric expectation that the
//! closed forms are checked against.
//!
//! With `s = -z`, the function is `b ∫₀¹ t^{b-1} / (1 + s t) dt`. Three
//! convergent regimes cover `s ∈ [0, ∞)`:
//!
//! * `s ≤ 1/2`: the defining series `Σ b/(b+n) (-s)^n`.
//! * `1/2 < s ≤ 2`: Pfaff's transformation,
//!   `(1+s)⁻¹ ₂F₁(1, 1; 1+b; s/(1+s))`, whose argument stays in `(1/3, 2/3]`.
//! * `s > 2`: the expansion about infinity,
//!   `b π s^{-b} / sin(πb) - b Σ_k (-1)^k s^{-1-k} / (k + 1 - b)`.
//!
//! `b = 1` is handled by the closed form `ln(1+s)/s`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};

const SERIES_REL_EPS: f64 = 1e-16;
const SERIES_MAX_TERMS: usize = 100_000;

/// Evaluates `₂F₁(1, b; 1 + b; z)` for `0 < b ≤ 1` and `z ≤ 0`.
pub fn hyp2f1_1b(b: f64, z: f64) -> Result<f64> {
    if !(b > 0.0 && b <= 1.0) {
        return Err(Error::domain(format!("parameter b = {b} outside (0, 1]")));
    }
    if !(z <= 0.0) || !z.is_finite() {
        return Err(Error::domain(format!("argument z = {z} outside (-inf, 0]")));
    }
    let s = -z;
    if s == 0.0 {
        return Ok(1.0);
    }
    if b == 1.0 {
        return Ok(s.ln_1p() / s);
    }
    if s <= 0.5 {
        direct_series(b, s)
    } else if s <= 2.0 {
        pfaff_series(b, s)
    } else {
        large_argument(b, s)
    }
}

fn direct_series(b: f64, s: f64) -> Result<f64> {
    let mut sum = 1.0;
    let mut power = 1.0;
    for n in 1..SERIES_MAX_TERMS {
        power *= -s;
        let term = b / (b + n as f64) * power;
        sum += term;
        if term.abs() < SERIES_REL_EPS * sum.abs() {
            return Ok(sum);
        }
    }
    Err(series_cap(b, -s))
}

fn pfaff_series(b: f64, s: f64) -> Result<f64> {
    let w = s / (1.0 + s);
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..SERIES_MAX_TERMS {
        let n = n as f64;
        term *= n / (n + b) * w;
        sum += term;
        if term < SERIES_REL_EPS * sum {
            return Ok(sum / (1.0 + s));
        }
    }
    Err(series_cap(b, -s))
}

fn large_argument(b: f64, s: f64) -> Result<f64> {
    // The k = 0 tail term and π/sin(πb) both blow up like 1/(1-b); they are
    // regrouped so the expansion stays accurate as b → 1:
    // F = b s^{-b} { [π/sin(πb) - 1/(1-b)] + (1 - s^{b-1})/(1-b)
    //               - Σ_{k≥1} (-1)^k s^{b-1-k} / (k+1-b) }
    let eps = 1.0 - b;
    let log_s = s.ln();
    let head = pi_csc_minus_pole(eps) + (-(-eps * log_s).exp_m1()) / eps;
    let inv = 1.0 / s;
    let mut power = -s.powf(-eps) * inv;
    let mut tail = 0.0;
    for k in 1..SERIES_MAX_TERMS {
        let term = power / (k as f64 + eps);
        tail += term;
        if term.abs() < SERIES_REL_EPS * head.abs() {
            return Ok(b * (-b * log_s).exp() * (head - tail));
        }
        power *= -inv;
    }
    Err(series_cap(b, -s))
}

/// `π / sin(π(1 - ε)) - 1/ε`, finite as `ε → 0`.
fn pi_csc_minus_pole(eps: f64) -> f64 {
    if eps < 1e-2 {
        // x / sin x = 1 + x²/6 + 7x⁴/360 + 31x⁶/15120 + 127x⁸/604800 + …
        let x2 = (PI * eps).powi(2);
        let ratio_m1 = x2 * (1.0 / 6.0 + x2 * (7.0 / 360.0 + x2 * (31.0 / 15120.0 + x2 * 127.0 / 604800.0)));
        ratio_m1 / eps
    } else {
        PI / (PI * eps).sin() - 1.0 / eps
    }
}

fn series_cap(b: f64, z: f64) -> Error {
    Error::Convergence(format!(
        "2F1(1, {b}; {}; {z}) did not converge within {SERIES_MAX_TERMS} terms",
        1.0 + b
    ))
}

/// Evaluates the ring average `E[d1^η / (d1^η + γ D^η)]` with `D` drawn from
/// the density `2x / (l_hi² - l_lo²)` on `[l_lo, l_hi]`, by adaptive
/// Gauss–Kronrod quadrature at 1e-10 relative tolerance.
///
/// Multiplying by `α e^{-α}` gives the SIC capture probability.
pub fn q2_integral_quadrature(d1: f64, gamma: f64, eta: f64, l_lo: f64, l_hi: f64) -> Result<f64> {
    if !(d1 > 0.0) || !d1.is_finite() {
        return Err(Error::domain(format!("distance d1 = {d1} must be positive")));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::domain(format!("capture threshold {gamma} must be positive")));
    }
    if !(eta >= 2.0) || !eta.is_finite() {
        return Err(Error::domain(format!("path-loss exponent {eta} must be at least 2")));
    }
    if !(l_lo >= 0.0) || !(l_hi > l_lo) || !l_hi.is_finite() {
        return Err(Error::domain(format!(
            "ring bounds [{l_lo}, {l_hi}] are not a valid interval"
        )));
    }
    let span = l_hi * l_hi - l_lo * l_lo;
    let integrand = |x: f64| 2.0 * x / (1.0 + gamma * (x / d1).powf(eta)) / span;
    // the integrand's knee, where γ (x/d1)^η = 1
    let knee = d1 * gamma.powf(-1.0 / eta);
    let mut points = vec![l_lo];
    if knee > l_lo && knee < l_hi {
        points.push(knee);
    }
    points.push(l_hi);
    quadrature::integrate_with_breaks(integrand, &points, Tolerance::default())
}
