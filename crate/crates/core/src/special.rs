//! Normal distribution and log-gamma helpers (f64).

use statrs::function::{erf, gamma};

/// Standard normal CDF `Φ(x)`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Upper tail `1 − Φ(x)`, accurate for large `x`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erf::erfc(x / std::f64::consts::SQRT_2)
}

/// Two-sided p-value `2Φ(−|t|)`.
pub fn two_sided_p(t: f64) -> f64 {
    (2.0 * normal_sf(t.abs())).min(1.0)
}

/// `Φ⁻¹(q)` for `q ∈ (0, 1)`.
pub fn normal_quantile(q: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erf::erfc_inv(2.0 * q)
}

pub fn ln_gamma(x: f64) -> f64 {
    gamma::ln_gamma(x)
}
