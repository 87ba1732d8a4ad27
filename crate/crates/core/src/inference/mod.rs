//! Simultaneous confidence intervals, global tests, Benjamini–Hochberg
//! screening and relative-efficiency estimates built on the estimator and
//! bootstrap modules.
//!
//! JSON encodings use 0-based coordinate indices.

mod are;
mod fdr;
mod sci;
mod tests;

pub use are::{are_analytic, are_bootstrap, AreModel, AreReport};
pub use fdr::{bh_fdr, fdr_screen, fdr_screen_with_fit, marginal_stats, BhOutcome, FdrResult};
pub use sci::{sci, sci_from_draws, CenterMethod, SciResult};
pub use tests::{
    bootstrap_p_value, global_test_cq, global_test_mean, global_test_median, global_test_wpl,
    max_test_from_draws, GlobalTestResult, TestMethod,
};

use crate::error::{Error, Result};

pub(crate) fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidLevel(level))
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
