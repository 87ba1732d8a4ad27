use serde::{Deserialize, Serialize};

use super::{check_dim, check_level};
use crate::bootstrap::{bootstrap_mean, bootstrap_spatial_median, quantile, BootstrapDraws};
use crate::data::Sample;
use crate::error::{Error, Result};
use crate::estimator::{spatial_median, spatial_sign, SolverConfig};
use crate::scalar::{dot, Scalar};
use crate::special::{normal_quantile, normal_sf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TestMethod {
    /// `√n·|θ̂ − θ₀|_∞` calibrated by the spatial-median multiplier bootstrap.
    #[serde(rename = "median", alias = "MedianMax")]
    MedianMax,
    /// `√n·|X̄ − θ₀|_∞` calibrated by the mean multiplier bootstrap.
    #[serde(rename = "mean", alias = "MeanMax")]
    MeanMax,
    /// Pairwise spatial-sign statistic with a normal calibration.
    #[serde(rename = "WPL", alias = "wpl")]
    Wpl,
    /// Pairwise mean U-statistic with a normal calibration (comparator only).
    #[serde(rename = "CQ", alias = "cq")]
    Cq,
}

impl TestMethod {
    pub const ALL: [TestMethod; 4] =
        [TestMethod::MedianMax, TestMethod::MeanMax, TestMethod::Wpl, TestMethod::Cq];

    pub fn label(self) -> &'static str {
        match self {
            TestMethod::MedianMax => "median",
            TestMethod::MeanMax => "mean",
            TestMethod::Wpl => "WPL",
            TestMethod::Cq => "CQ",
        }
    }
}

/// Outcome of a test of `H₀: θ = θ₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalTestResult<T> {
    pub method: TestMethod,
    pub statistic: T,
    pub critical_value: T,
    pub p_value: f64,
    pub reject: bool,
}

/// `(1 + #{b: stat_b ≥ statistic}) / (B + 1)`.
pub fn bootstrap_p_value<T: Scalar>(draws: &BootstrapDraws<T>, statistic: T) -> f64 {
    let exceed = draws.stats.iter().filter(|&&s| s >= statistic).count();
    (1 + exceed) as f64 / (draws.replicates() + 1) as f64
}

/// Max-norm test of `center` against `theta0` using precomputed draws.
pub fn max_test_from_draws<T: Scalar>(
    center: &[T],
    theta0: &[T],
    tau: f64,
    draws: &BootstrapDraws<T>,
    method: TestMethod,
) -> Result<GlobalTestResult<T>> {
    check_level(tau)?;
    check_dim(center.len(), theta0.len())?;
    let sqrt_n = T::of_usize(draws.n).sqrt();
    let statistic = center
        .iter()
        .zip(theta0)
        .map(|(&c, &t)| sqrt_n * (c - t).abs())
        .fold(T::zero(), T::max);
    let critical_value = quantile(draws, 1.0 - tau)?;
    Ok(GlobalTestResult {
        method,
        statistic,
        critical_value,
        p_value: bootstrap_p_value(draws, statistic),
        reject: statistic > critical_value,
    })
}

/// Spatial-median max-norm test at significance `tau`.
pub fn global_test_median<T: Scalar>(
    sample: &Sample<T>,
    theta0: &[T],
    tau: f64,
    replicates: usize,
    seed: u64,
) -> Result<GlobalTestResult<T>> {
    check_level(tau)?;
    check_dim(sample.p(), theta0.len())?;
    let config = SolverConfig::default();
    let fit = spatial_median(sample, &config)?;
    let draws = bootstrap_spatial_median(sample, &fit, replicates, seed, &config)?;
    max_test_from_draws(&fit.theta_hat, theta0, tau, &draws, TestMethod::MedianMax)
}

/// Sample-mean max-norm test at significance `tau`.
pub fn global_test_mean<T: Scalar>(
    sample: &Sample<T>,
    theta0: &[T],
    tau: f64,
    replicates: usize,
    seed: u64,
) -> Result<GlobalTestResult<T>> {
    check_level(tau)?;
    check_dim(sample.p(), theta0.len())?;
    let draws = bootstrap_mean(sample, replicates, seed)?;
    max_test_from_draws(&sample.mean(), theta0, tau, &draws, TestMethod::MeanMax)
}

/// `Σ_{i<j} g_ij` and `Σ_{i<j} g_ij²` for the Gram entries of `rows`.
fn pairwise_sums<T: Scalar>(rows: &[T], p: usize) -> (f64, f64) {
    let rows: Vec<&[T]> = rows.chunks_exact(p).collect();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for i in 1..rows.len() {
        for j in 0..i {
            let g = dot(rows[i], rows[j]).as_f64();
            sum += g;
            sum_sq += g * g;
        }
    }
    (sum, sum_sq)
}

fn normal_calibrated<T: Scalar>(
    statistic: f64,
    sd: f64,
    tau: f64,
    method: TestMethod,
) -> GlobalTestResult<T> {
    let critical = normal_quantile(1.0 - tau) * sd;
    let p_value = if sd > 0.0 {
        normal_sf(statistic / sd)
    } else if statistic > 0.0 {
        0.0
    } else {
        1.0
    };
    GlobalTestResult {
        method,
        statistic: T::of(statistic),
        critical_value: T::of(critical),
        p_value,
        reject: statistic > critical,
    }
}

/// Spatial-sign test `T = Σ_{i<j} W_iᵀW_j`, `W_i = S(X_i − θ₀)`.
///
/// Under `H₀`, `Var T = n(n−1)/2 · tr(B²)`; `tr(B²)` is estimated by the
/// off-diagonal average of `(W_iᵀW_j)²`, which makes the variance estimate
/// `Σ_{i<j} (W_iᵀW_j)²`. Rejects when `T / sd` exceeds `Φ⁻¹(1 − τ)`.
pub fn global_test_wpl<T: Scalar>(
    sample: &Sample<T>,
    theta0: &[T],
    tau: f64,
) -> Result<GlobalTestResult<T>> {
    check_level(tau)?;
    check_dim(sample.p(), theta0.len())?;
    if sample.n() < 2 {
        return Err(Error::InvalidArgument("WPL test needs n >= 2".into()));
    }
    let p = sample.p();
    let residuals = sample.residuals(theta0);
    let signs: Vec<T> = residuals.chunks_exact(p).flat_map(spatial_sign).collect();
    let (stat, var) = pairwise_sums(&signs, p);
    Ok(normal_calibrated(stat, var.sqrt(), tau, TestMethod::Wpl))
}

/// Mean-based U-statistic `T = Σ_{i≠j} (X_i − θ₀)ᵀ(X_j − θ₀)` with plug-in
/// variance `2n(n−1)·tr(Σ²)`, `tr(Σ²)` estimated by the off-diagonal average
/// of squared Gram entries.
pub fn global_test_cq<T: Scalar>(
    sample: &Sample<T>,
    theta0: &[T],
    tau: f64,
) -> Result<GlobalTestResult<T>> {
    check_level(tau)?;
    check_dim(sample.p(), theta0.len())?;
    if sample.n() < 2 {
        return Err(Error::InvalidArgument("CQ test needs n >= 2".into()));
    }
    let residuals = sample.residuals(theta0);
    let (half, half_sq) = pairwise_sums(&residuals, sample.p());
    Ok(normal_calibrated(2.0 * half, 2.0 * half_sq.sqrt(), tau, TestMethod::Cq))
}

#[cfg(test)]
mod unit {
    use super::*;

    #[test]
    fn wpl_small_cases() {
        let s = Sample::from_rows(&[[1.0, 0.0], [-2.0, 0.0]]).unwrap();
        let r = global_test_wpl(&s, &[0.0, 0.0], 0.05).unwrap();
        assert_eq!(r.statistic, -1.0);
        assert!(!r.reject);
        let s = Sample::from_rows(&[[1.0, 0.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, -2.0]]).unwrap();
        let r = global_test_wpl(&s, &[0.0, 0.0, 0.0], 0.05).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(matches!(
            global_test_wpl(&s, &[0.0, 0.0], 0.05),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn constant_sample_at_null() {
        let s = Sample::from_rows(&[[1.0, 2.0]; 4]).unwrap();
        let r = global_test_cq(&s, &[1.0, 2.0], 0.05).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(!r.reject);
        let r = global_test_mean(&s, &[1.0, 2.0], 0.05, 50, 1).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(!r.reject);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn symmetric_about_null_median_never_rejects() {
        let s = Sample::from_rows(&[[1.0, 0.5], [-1.0, -0.5], [0.3, -2.0], [-0.3, 2.0]]).unwrap();
        let r = global_test_median(&s, &[0.0, 0.0], 0.05, 200, 9).unwrap();
        assert!(r.statistic < 1e-12);
        assert!(!r.reject);
    }

    #[test]
    fn p_value_convention() {
        let draws = BootstrapDraws {
            stats: vec![1.0, 2.0, 3.0],
            seed: 0,
            target: crate::bootstrap::BootstrapTarget::Mean,
            scheme: crate::bootstrap::MultiplierScheme::Rademacher,
            n: 1,
        };
        assert_eq!(bootstrap_p_value(&draws, 2.0), 3.0 / 4.0);
        assert_eq!(bootstrap_p_value(&draws, 10.0), 1.0 / 4.0);
    }

    #[test]
    fn json_shape() {
        let r = GlobalTestResult::<f64> {
            method: TestMethod::Wpl,
            statistic: 1.0,
            critical_value: 2.0,
            p_value: 0.5,
            reject: false,
        };
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"method":"WPL","statistic":1.0,"critical_value":2.0,"p_value":0.5,"reject":false}"#
        );
    }
}
