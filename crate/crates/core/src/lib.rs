//! Spatial-median based inference for high-dimensional location parameters.
//!
//! The crate covers point estimation (sample spatial median and the geometric
//! median-of-means), a Rademacher multiplier bootstrap for the max-norm of the
//! estimator, simultaneous confidence intervals, global tests, Benjamini–Hochberg
//! screening and relative-efficiency estimates, plus seeded synthetic data
//! generators and a Monte Carlo harness built on top of them.
//!
//! The numerical core is generic over the floating-point type through
//! [`Scalar`] (implemented for `f32` and `f64`). Most callers want the `f64`
//! aliases exported at the crate root, e.g. [`Sample64`].
//!
//! ```
//! use geomedian::{spatial_median, Sample64, SolverConfig};
//!
//! let sample = Sample64::from_rows(&[vec![1.0], vec![2.0], vec![3.0], vec![4.0], vec![5.0]]).unwrap();
//! let fit = spatial_median(&sample, &SolverConfig::default()).unwrap();
//! assert_eq!(fit.theta_hat[0], 3.0);
//! ```

pub mod bootstrap;
pub mod data;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod inference;
pub mod rng;
pub mod scalar;
pub mod simdata;
pub mod special;

pub use bootstrap::{
    bootstrap_mean, bootstrap_spatial_median, conditional_variance, quantile, with_workers,
    BootstrapDraws,
    BootstrapTarget, MultiplierScheme,
};
pub use data::{
    ar1_shape, read_csv, symmetric_sqrt, validate_sample, write_csv, Matrix, Sample, ShapeMatrix,
    Vector,
};
pub use error::{Error, Result};
pub use estimator::{
    bahadur_remainder, gmom, spatial_median, spatial_sign, SolverConfig, SpatialMedianFit,
};
pub use inference::{
    are_analytic, are_bootstrap, bh_fdr, fdr_screen, global_test_cq, global_test_mean,
    global_test_median, global_test_wpl, marginal_stats, sci, AreModel, AreReport, BhOutcome,
    CenterMethod, FdrResult, GlobalTestResult, SciResult, TestMethod,
};
pub use scalar::Scalar;
pub use simdata::{draw, theta_vector, DistributionSpec, Generator, Model, ThetaPattern};
pub use harness::{emit_report, run as run_scenario, Experiment, MetricsRow, MetricsTable, ReportFormat, ScenarioSpec};

pub type Sample64 = Sample<f64>;
pub type Sample32 = Sample<f32>;
pub type Vector64 = Vector<f64>;
pub type Vector32 = Vector<f32>;
pub type ShapeMatrix64 = ShapeMatrix<f64>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type SpatialMedianFit64 = SpatialMedianFit<f64>;
pub type BootstrapDraws64 = BootstrapDraws<f64>;
pub type SciResult64 = SciResult<f64>;
pub type GlobalTestResult64 = GlobalTestResult<f64>;
pub type FdrResult64 = FdrResult<f64>;
