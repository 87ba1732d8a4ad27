use serde::{Deserialize, Serialize};

use crate::bootstrap::{bootstrap_mean, bootstrap_spatial_median, conditional_variance};
use crate::data::Sample;
use crate::error::{Error, Result};
use crate::estimator::{spatial_median, SolverConfig};
use crate::scalar::Scalar;
use crate::special::ln_gamma;

/// Models with a closed-form high-dimensional relative efficiency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AreModel {
    Gaussian,
    StudentT { df: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreReport {
    /// `Var*(|X̄*|_∞) / Var*(|θ̃|_∞)`.
    pub are_estimate: f64,
    pub are_analytic: Option<f64>,
    pub model: String,
}

/// Closed-form efficiency of the spatial median relative to the mean for
/// max-norm inference, evaluated in log-gamma space:
///
/// * Gaussian: `p·Γ(p/2 − 1/2)² / (√2·Γ(p/2))²`
/// * multivariate t with `v > 2` degrees of freedom:
///   `p·{Γ(v/2 + 1/2)Γ(p/2 − 1/2)}² / ((v − 2)·{Γ(v/2)Γ(p/2)}²)`
pub fn are_analytic(model: AreModel, p: usize) -> Result<f64> {
    if p < 2 {
        return Err(Error::InvalidArgument(format!("analytic ARE needs p >= 2, got {p}")));
    }
    let pf = p as f64;
    let ratio = ln_gamma(pf / 2.0 - 0.5) - ln_gamma(pf / 2.0);
    let log_are = match model {
        AreModel::Gaussian => pf.ln() + 2.0 * ratio - std::f64::consts::LN_2,
        AreModel::StudentT { df } => {
            if !(df > 2.0) {
                return Err(Error::InvalidDf(df));
            }
            pf.ln() - (df - 2.0).ln()
                + 2.0 * (ln_gamma(df / 2.0 + 0.5) - ln_gamma(df / 2.0) + ratio)
        }
    };
    Ok(log_are.exp())
}

/// Bootstrap estimate of the relative efficiency from one sample. The two
/// engines use their own sign families, so one seed drives both.
pub fn are_bootstrap<T: Scalar>(sample: &Sample<T>, replicates: usize, seed: u64) -> Result<AreReport> {
    if sample.n() < 2 {
        return Err(Error::InvalidArgument("ARE needs n >= 2".into()));
    }
    if replicates < 2 {
        return Err(Error::TooFewDraws { needed: 2, found: replicates });
    }
    let config = SolverConfig::default();
    let fit = spatial_median(sample, &config)?;
    let med = bootstrap_spatial_median(sample, &fit, replicates, seed, &config)?;
    let mean = bootstrap_mean(sample, replicates, seed)?;
    let denom = conditional_variance(&med)?.as_f64();
    if denom <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let num = conditional_variance(&mean)?.as_f64();
    Ok(AreReport { are_estimate: num / denom, are_analytic: None, model: "bootstrap".into() })
}
