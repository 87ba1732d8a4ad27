use serde::{Deserialize, Serialize};

use crate::data::{ar1_shape, ShapeMatrix};
use crate::error::{Error, Result};
use crate::inference::TestMethod;
use crate::simdata::{theta_vector, DistributionSpec, Generator, Model, ThetaPattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Coverage,
    SizePower,
    Fdr,
    Are,
    Bahadur,
}

impl Experiment {
    pub fn label(self) -> &'static str {
        match self {
            Experiment::Coverage => "coverage",
            Experiment::SizePower => "size_power",
            Experiment::Fdr => "fdr",
            Experiment::Are => "are",
            Experiment::Bahadur => "bahadur",
        }
    }
}

fn one() -> f64 {
    1.0
}

fn default_replications() -> usize {
    500
}

fn default_boot() -> usize {
    200
}

fn default_levels() -> Vec<f64> {
    vec![0.9]
}

fn default_c0() -> f64 {
    0.5
}

fn default_methods() -> Vec<TestMethod> {
    vec![TestMethod::MedianMax, TestMethod::MeanMax, TestMethod::Wpl]
}

fn default_pattern() -> ThetaPattern {
    ThetaPattern::Zero
}

/// One Monte Carlo experiment, read from JSON.
///
/// `levels` are confidence levels for `coverage` and significance levels
/// (`τ` or `α`) for `size_power` and `fdr`. Defaults are desk scale: 500
/// replications and 200 bootstrap draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    #[serde(default)]
    pub name: String,
    pub experiment: Experiment,
    pub model: Model,
    /// AR(1) correlation of the shape matrix.
    #[serde(default)]
    pub rho: f64,
    /// Multiplies the AR(1) matrix. For Student-t models, `df/(df − 2)` turns
    /// the matrix from a covariance into the scale matrix of the mixture.
    #[serde(default = "one")]
    pub sigma_scale: f64,
    pub n: usize,
    pub p: usize,
    #[serde(default = "default_pattern")]
    pub theta_pattern: ThetaPattern,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_boot", alias = "B")]
    pub boot: usize,
    #[serde(default = "default_levels")]
    pub levels: Vec<f64>,
    pub seed: u64,
    /// Signal magnitudes for `size_power`; `0` gives the size row.
    #[serde(default)]
    pub kappa_grid: Vec<f64>,
    #[serde(default = "default_c0")]
    pub c0: f64,
    #[serde(default = "default_methods")]
    pub methods: Vec<TestMethod>,
    /// Dimensions for `are`; empty means `[p]`.
    #[serde(default)]
    pub p_grid: Vec<usize>,
    /// Sample sizes for `are` and `bahadur`; empty means `[n]`.
    #[serde(default)]
    pub n_grid: Vec<usize>,
    /// Also average the per-sample bootstrap ARE estimate (`are` only).
    #[serde(default)]
    pub bootstrap_are: bool,
    /// Record wall-clock time per row. Off by default so reports are
    /// reproducible byte for byte.
    #[serde(default)]
    pub timing: bool,
}

impl ScenarioSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if self.replications == 0 {
            return bad("replications must be at least 1");
        }
        if self.n == 0 || self.p == 0 {
            return Err(Error::EmptyInput);
        }
        if self.levels.is_empty() {
            return bad("levels must not be empty");
        }
        if let Some(&l) = self.levels.iter().find(|&&l| !(l > 0.0 && l < 1.0)) {
            return Err(Error::InvalidLevel(l));
        }
        if self.n < 2 && self.experiment != Experiment::Bahadur {
            return bad("n must be at least 2");
        }
        self.model.validate()?;
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::InvalidRho(self.rho));
        }
        if !(self.sigma_scale > 0.0 && self.sigma_scale.is_finite()) {
            return bad("sigma_scale must be positive and finite");
        }
        let needs_boot = matches!(self.experiment, Experiment::Coverage | Experiment::SizePower)
            || (self.experiment == Experiment::Are && self.bootstrap_are);
        if needs_boot && self.boot == 0 {
            return Err(Error::TooFewDraws { needed: 1, found: 0 });
        }
        if self.experiment == Experiment::SizePower && self.methods.is_empty() {
            return bad("methods must not be empty");
        }
        if self.kappa_grid.iter().any(|k| !k.is_finite() || *k < 0.0) {
            return bad("kappa_grid entries must be finite and non-negative");
        }
        if self.p_grid.contains(&0) || self.n_grid.contains(&0) {
            return Err(Error::EmptyInput);
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        if self.name.is_empty() {
            format!("{}-rho{}-n{}-p{}", self.model.label(), self.rho, self.n, self.p)
        } else {
            self.name.clone()
        }
    }

    pub(crate) fn shape(&self, p: usize) -> Result<ShapeMatrix<f64>> {
        let base = if self.rho == 0.0 { ShapeMatrix::identity(p) } else { ar1_shape(p, self.rho)? };
        Ok(if self.sigma_scale == 1.0 { base } else { base.scaled(self.sigma_scale) })
    }

    /// Generator for dimension `p` centred at `theta_pattern` with sample size
    /// `n` in the signal scaling.
    pub(crate) fn generator(&self, n: usize, p: usize) -> Result<Generator<f64>> {
        let theta = theta_vector(self.theta_pattern, p, n)?;
        Generator::new(&DistributionSpec { model: self.model, theta, shape: self.shape(p)? })
    }

    pub(crate) fn n_grid(&self) -> Vec<usize> {
        if self.n_grid.is_empty() {
            vec![self.n]
        } else {
            self.n_grid.clone()
        }
    }

    pub(crate) fn p_grid(&self) -> Vec<usize> {
        if self.p_grid.is_empty() {
            vec![self.p]
        } else {
            self.p_grid.clone()
        }
    }
}
