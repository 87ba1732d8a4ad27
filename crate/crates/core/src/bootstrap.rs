//! Rademacher multiplier bootstrap for the max-norm of the spatial median and
//! of the sample mean.
//!
//! Replicate `b` draws its signs from [`substream`]`(seed, family, b)` where the
//! family is [`domain::BOOT_MEDIAN`] or [`domain::BOOT_MEAN`], so the two
//! engines never share signs and the output does not depend on the number of
//! rayon workers. Replicates are independent: the solver never carries state
//! from one replicate into another.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Sample;
use crate::error::{Error, Result};
use crate::estimator::{weiszfeld, SolverConfig, SpatialMedianFit};
use crate::rng::{domain, rademacher_signs, substream};
use crate::scalar::{max_abs, Scalar};

/// Default number of bootstrap replicates.
pub const DEFAULT_REPLICATES: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MultiplierScheme {
    /// `±1` with probability 1/2 each.
    Rademacher,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BootstrapTarget {
    SpatialMedian,
    Mean,
}

/// Replicate statistics `√n·|θ̃^{(b)}|_∞` (or the mean analogue).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapDraws<T> {
    pub stats: Vec<T>,
    pub seed: u64,
    pub target: BootstrapTarget,
    pub scheme: MultiplierScheme,
    /// Sample size the statistics were scaled with.
    pub n: usize,
}

impl<T: Scalar> BootstrapDraws<T> {
    pub fn replicates(&self) -> usize {
        self.stats.len()
    }

    /// Writes one statistic per line under a `stat` header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "stat")?;
        for s in &self.stats {
            writeln!(w, "{s}")?;
        }
        Ok(())
    }
}

/// Signs used by replicate `b` of the given family, exposed so callers can
/// reproduce a replicate by hand.
pub fn replicate_signs(seed: u64, target: BootstrapTarget, b: usize, n: usize) -> Vec<bool> {
    let family = match target {
        BootstrapTarget::SpatialMedian => domain::BOOT_MEDIAN,
        BootstrapTarget::Mean => domain::BOOT_MEAN,
    };
    rademacher_signs(&mut substream(seed, family, b as u64), n)
}

fn signed_rows<T: Scalar>(residuals: &[T], p: usize, signs: &[bool]) -> Vec<T> {
    let mut out = residuals.to_vec();
    for (row, &plus) in out.chunks_exact_mut(p).zip(signs) {
        if !plus {
            row.iter_mut().for_each(|v| *v = -*v);
        }
    }
    out
}

/// `argmin_β Σ ‖Z_i r_i − β‖` for fixed residual rows `r_i` and signs `Z_i`.
///
/// The iteration starts from the multiplier mean `n⁻¹ Σ Z_i r_i`.
pub fn multiplier_spatial_median<T: Scalar>(
    residuals: &[T],
    p: usize,
    signs: &[bool],
    config: &SolverConfig<T>,
) -> Result<Vec<T>> {
    let n = signs.len();
    debug_assert_eq!(residuals.len(), n * p);
    let points = signed_rows(residuals, p, signs);
    let mut init = vec![T::zero(); p];
    for row in points.chunks_exact(p) {
        for (a, &v) in init.iter_mut().zip(row) {
            *a += v;
        }
    }
    let inv = T::one() / T::of_usize(n);
    init.iter_mut().for_each(|v| *v *= inv);
    Ok(weiszfeld(&points, n, p, init, config, None)?.point)
}

/// `n⁻¹ Σ Z_i r_i`.
pub fn multiplier_mean<T: Scalar>(residuals: &[T], p: usize, signs: &[bool]) -> Vec<T> {
    let mut acc = vec![T::zero(); p];
    for (row, &plus) in residuals.chunks_exact(p).zip(signs) {
        if plus {
            acc.iter_mut().zip(row).for_each(|(a, &v)| *a += v);
        } else {
            acc.iter_mut().zip(row).for_each(|(a, &v)| *a -= v);
        }
    }
    let inv = T::one() / T::of_usize(signs.len());
    acc.iter_mut().for_each(|v| *v *= inv);
    acc
}

fn check_replicates(b: usize) -> Result<()> {
    if b == 0 {
        return Err(Error::TooFewDraws { needed: 1, found: 0 });
    }
    Ok(())
}

/// Multiplier bootstrap of the spatial median: replicate `b` solves
/// `θ̃ = argmin_β Σ ‖Z_i(X_i − θ̂) − β‖` and records `√n·|θ̃|_∞`.
pub fn bootstrap_spatial_median<T: Scalar>(
    sample: &Sample<T>,
    fit: &SpatialMedianFit<T>,
    replicates: usize,
    seed: u64,
    config: &SolverConfig<T>,
) -> Result<BootstrapDraws<T>> {
    check_replicates(replicates)?;
    config.validate()?;
    let (n, p) = (sample.n(), sample.p());
    if fit.theta_hat.len() != p {
        return Err(Error::DimensionMismatch { expected: p, found: fit.theta_hat.len() });
    }
    let residuals = sample.residuals(&fit.theta_hat);
    let sqrt_n = T::of_usize(n).sqrt();
    let stats = (0..replicates)
        .into_par_iter()
        .map(|b| {
            let signs = replicate_signs(seed, BootstrapTarget::SpatialMedian, b, n);
            multiplier_spatial_median(&residuals, p, &signs, config)
                .map(|theta| sqrt_n * max_abs(&theta))
                .map_err(|e| match e {
                    Error::DidNotConverge { iterations, grad_norm, .. } => {
                        Error::DidNotConverge { iterations, grad_norm, replicate: Some(b) }
                    }
                    other => other,
                })
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(BootstrapDraws {
        stats,
        seed,
        target: BootstrapTarget::SpatialMedian,
        scheme: MultiplierScheme::Rademacher,
        n,
    })
}

/// Multiplier bootstrap of the sample mean: replicate `b` records
/// `√n·|n⁻¹ Σ Z_i(X_i − X̄)|_∞`.
pub fn bootstrap_mean<T: Scalar>(
    sample: &Sample<T>,
    replicates: usize,
    seed: u64,
) -> Result<BootstrapDraws<T>> {
    check_replicates(replicates)?;
    let (n, p) = (sample.n(), sample.p());
    let residuals = sample.residuals(&sample.mean());
    let sqrt_n = T::of_usize(n).sqrt();
    let stats = (0..replicates)
        .into_par_iter()
        .map(|b| {
            let signs = replicate_signs(seed, BootstrapTarget::Mean, b, n);
            sqrt_n * max_abs(&multiplier_mean(&residuals, p, &signs))
        })
        .collect();
    Ok(BootstrapDraws {
        stats,
        seed,
        target: BootstrapTarget::Mean,
        scheme: MultiplierScheme::Rademacher,
        n,
    })
}

/// Empirical `level`-quantile: the `⌈level·B⌉`-th order statistic, i.e. the
/// smallest draw whose empirical CDF is at least `level`.
pub fn quantile<T: Scalar>(draws: &BootstrapDraws<T>, level: f64) -> Result<T> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidLevel(level));
    }
    order_statistic_quantile(&draws.stats, level)
}

pub(crate) fn order_statistic_quantile<T: Scalar>(stats: &[T], level: f64) -> Result<T> {
    let b = stats.len();
    if b == 0 {
        return Err(Error::TooFewDraws { needed: 1, found: 0 });
    }
    // level·B is rounded before the ceiling so that e.g. 0.9·200 selects the
    // 180th and not the 181st order statistic.
    let raw = level * b as f64;
    let k = ((raw - 1e-9 * raw.max(1.0)).ceil() as usize).clamp(1, b);
    let mut sorted = stats.to_vec();
    sorted.sort_by(|a, c| a.partial_cmp(c).expect("finite statistics"));
    Ok(sorted[k - 1])
}

/// Unbiased sample variance of `stats / √n`, i.e. of the unscaled max-norms.
pub fn conditional_variance<T: Scalar>(draws: &BootstrapDraws<T>) -> Result<T> {
    let b = draws.stats.len();
    if b < 2 {
        return Err(Error::TooFewDraws { needed: 2, found: b });
    }
    let sqrt_n = T::of_usize(draws.n).sqrt();
    let vals: Vec<T> = draws.stats.iter().map(|&s| s / sqrt_n).collect();
    let mean = vals.iter().copied().sum::<T>() / T::of_usize(b);
    let ss: T = vals.iter().map(|&v| (v - mean) * (v - mean)).sum();
    Ok(ss / T::of_usize(b - 1))
}

/// Runs `f` on a dedicated pool with `workers` threads (0 means the rayon
/// default). Results never depend on the worker count.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
