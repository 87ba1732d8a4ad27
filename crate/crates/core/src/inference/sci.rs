use serde::ser::{Serialize, SerializeStruct, Serializer};
use serde::Deserialize;

use super::check_level;
use crate::bootstrap::{bootstrap_mean, bootstrap_spatial_median, quantile, BootstrapDraws};
use crate::data::Sample;
use crate::error::{Error, Result};
use crate::estimator::{spatial_median, SolverConfig};
use crate::scalar::Scalar;

/// Which location estimator the intervals are centred on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterMethod {
    SpatialMedian,
    Mean,
}

/// Max-norm simultaneous intervals `center_j ∓ q_boot/√n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SciResult<T> {
    pub center: Vec<T>,
    pub lower: Vec<T>,
    pub upper: Vec<T>,
    pub level: f64,
    pub q_boot: T,
    pub n: usize,
    pub method: CenterMethod,
}

impl<T: Scalar> SciResult<T> {
    /// Common interval width `2·q_boot/√n`.
    pub fn width(&self) -> T {
        let two = T::one() + T::one();
        two * self.q_boot / T::of_usize(self.n).sqrt()
    }

    /// True when every coordinate of `theta` lies in its interval. Evaluated
    /// as `√n·|center_j − θ_j| ≤ q_boot`, the same arithmetic the max-norm test
    /// uses, so interval membership and test acceptance agree exactly.
    pub fn contains(&self, theta: &[T]) -> bool {
        let sqrt_n = T::of_usize(self.n).sqrt();
        self.center
            .iter()
            .zip(theta)
            .all(|(&c, &t)| sqrt_n * (c - t).abs() <= self.q_boot)
    }
}

impl<T: Scalar> Serialize for SciResult<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let intervals: Vec<[T; 2]> =
            self.lower.iter().zip(&self.upper).map(|(&l, &u)| [l, u]).collect();
        let mut st = serializer.serialize_struct("SciResult", 3)?;
        st.serialize_field("level", &self.level)?;
        st.serialize_field("q_boot", &self.q_boot)?;
        st.serialize_field("intervals", &intervals)?;
        st.end()
    }
}

/// Builds intervals around `center` from bootstrap draws of the matching
/// estimator.
pub fn sci_from_draws<T: Scalar>(
    center: &[T],
    draws: &BootstrapDraws<T>,
    level: f64,
    method: CenterMethod,
) -> Result<SciResult<T>> {
    check_level(level)?;
    let q_boot = quantile(draws, level)?;
    let half = q_boot / T::of_usize(draws.n).sqrt();
    Ok(SciResult {
        center: center.to_vec(),
        lower: center.iter().map(|&c| c - half).collect(),
        upper: center.iter().map(|&c| c + half).collect(),
        level,
        q_boot,
        n: draws.n,
        method,
    })
}

/// Simultaneous `level` confidence intervals for every coordinate of the
/// location parameter.
pub fn sci<T: Scalar>(
    sample: &Sample<T>,
    level: f64,
    replicates: usize,
    seed: u64,
    method: CenterMethod,
) -> Result<SciResult<T>> {
    check_level(level)?;
    if sample.n() < 2 {
        return Err(Error::InvalidArgument("intervals need n >= 2".into()));
    }
    let config = SolverConfig::default();
    match method {
        CenterMethod::SpatialMedian => {
            let fit = spatial_median(sample, &config)?;
            let draws = bootstrap_spatial_median(sample, &fit, replicates, seed, &config)?;
            sci_from_draws(&fit.theta_hat, &draws, level, method)
        }
        CenterMethod::Mean => {
            let draws = bootstrap_mean(sample, replicates, seed)?;
            sci_from_draws(&sample.mean(), &draws, level, method)
        }
    }
}
