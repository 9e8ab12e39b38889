//! Thin wrappers around the special functions the rest of the crate leans on:
//! the standard normal density/CDF/quantile, chi-square CDFs, the chi density,
//! and the Gaussian isoperimetric profile φ∘Φ⁻¹.

use statrs::function::beta::beta_reg;
use statrs::function::erf::{erfc, erfc_inv};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Standard normal density φ(x).
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Standard normal CDF Φ(x), evaluated through erfc for tail accuracy.
#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Standard normal quantile Φ⁻¹(p). Maps 0.5 to exactly 0.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("quantile argument {p} outside [0, 1]")));
    }
    Ok(-SQRT_2 * erfc_inv(2.0 * p))
}

/// Gaussian measure of the symmetric interval [-c, c], i.e. 2Φ(c) − 1.
#[inline]
pub fn symmetric_interval_mass(c: f64) -> f64 {
    // erf(c/√2), written via erfc to keep one code path.
    1.0 - erfc(c / SQRT_2)
}

/// Half-width c of the symmetric interval with Gaussian mass `gamma`.
pub fn symmetric_interval_halfwidth(gamma: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::invalid(format!(
            "interval mass {gamma} outside [0, 1)"
        )));
    }
    normal_quantile(0.5 * (1.0 + gamma))
}

/// Chi-square CDF P[χ²(k) ≤ x].
pub fn chi_square_cdf(k: usize, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    gamma_lr(k as f64 / 2.0, x / 2.0)
}

/// Chi-square quantile: the x with P[χ²(k) ≤ x] = p, by bisection on the CDF.
pub fn chi_square_quantile(k: usize, p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::invalid(format!("chi-square quantile {p} outside [0, 1)")));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let mut hi = k as f64 + 10.0;
    while chi_square_cdf(k, hi) < p {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chi_square_cdf(k, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Density of the chi distribution χ(k) at radius r.
pub fn chi_pdf(k: usize, r: f64) -> f64 {
    if r < 0.0 {
        return 0.0;
    }
    if r == 0.0 {
        // Positive only for k = 1, where the density is 2φ(0).
        return if k == 1 { 2.0 * normal_pdf(0.0) } else { 0.0 };
    }
    let kf = k as f64;
    let log_pdf = (1.0 - kf / 2.0) * std::f64::consts::LN_2 + (kf - 1.0) * r.ln()
        - 0.5 * r * r
        - ln_gamma(kf / 2.0);
    log_pdf.exp()
}

/// Regularized incomplete beta I_x(a, b).
#[inline]
pub fn regularized_beta(a: f64, b: f64, x: f64) -> f64 {
    beta_reg(a, b, x.clamp(0.0, 1.0))
}

/// Fraction of the sphere r·S^{n-1} with first coordinate in [-c, c].
///
/// The squared normalized coordinate (x₁/r)² follows Beta(1/2, (n−1)/2), so
/// this is the Beta CDF at (c/r)². Used as the shell-density closed form for
/// slabs.
pub fn sphere_cap_symmetric_mass(n: usize, r: f64, c: f64) -> f64 {
    if c >= r {
        return 1.0;
    }
    if n == 1 {
        // The 0-sphere is {±r}.
        return if c >= r { 1.0 } else { 0.0 };
    }
    let x = (c / r).powi(2);
    regularized_beta(0.5, (n as f64 - 1.0) / 2.0, x)
}

/// Gaussian isoperimetric profile φ∘Φ⁻¹(α), with the endpoint convention
/// φ∘Φ⁻¹(0) = φ∘Φ⁻¹(1) = 0.
pub fn gaussian_isoperimetric_profile(alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("profile argument {alpha} outside [0, 1]")));
    }
    if alpha == 0.0 || alpha == 1.0 {
        return Ok(0.0);
    }
    Ok(normal_pdf(normal_quantile(alpha)?))
}
