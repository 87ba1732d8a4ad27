//! Seeded generators for the synthetic location models.
//!
//! Row `i` of a sample drawn with seed `s` comes from
//! [`substream`]`(s, DATA_ROW, i)`, so growing `n` appends rows without
//! changing the earlier ones. Within a row, the Student-t mixing variable is
//! drawn first, then the `p` innovations in coordinate order.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{symmetric_sqrt, Matrix, Sample, ShapeMatrix, Vector};
use crate::error::{Error, Result};
use crate::rng::{domain, open_unit, substream};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    /// `θ + Σ^{1/2} Z`, `Z ~ N(0, I)`.
    #[serde(alias = "gaussian_i")]
    Gaussian,
    /// Multivariate t with covariance `Σ`: `θ + (Σ(v−2)/v)^{1/2} Z / √(W/v)`,
    /// `W ~ χ²_v`.
    StudentT { df: f64 },
    /// `θ + Σ^{1/2} Z` with i.i.d. unit-variance Laplace components.
    #[serde(alias = "laplace_ic")]
    Laplace,
}

impl Model {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Model::StudentT { df } if !(df > 2.0 && df.is_finite()) => Err(Error::InvalidDf(df)),
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Model::Gaussian => "gaussian".into(),
            Model::StudentT { df } => format!("t{df}"),
            Model::Laplace => "laplace".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSpec<T> {
    pub model: Model,
    pub theta: Vector<T>,
    pub shape: ShapeMatrix<T>,
}

/// Location patterns used across the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThetaPattern {
    /// `(2, −2, 3, 0, …, 0)`.
    Sparse3,
    /// `0.2` on the first `⌊p/4⌋` coordinates.
    DenseQuarter,
    /// `κ·(ln p / n)^{1/2}` on the first `⌊c0·ln p⌋` coordinates.
    LogSparse { c0: f64, kappa: f64 },
    /// `scale·(ln p / n)^{1/2}` on the first `⌊p/10⌋` coordinates.
    TenPercent { scale: f64 },
    Zero,
}

impl ThetaPattern {
    /// Number of leading non-zero coordinates for dimension `p`.
    pub fn support(&self, p: usize) -> usize {
        match *self {
            ThetaPattern::Sparse3 => 3,
            ThetaPattern::DenseQuarter => p / 4,
            ThetaPattern::LogSparse { c0, kappa } => {
                if kappa == 0.0 {
                    0
                } else {
                    (c0 * (p as f64).ln()).floor().max(0.0) as usize
                }
            }
            ThetaPattern::TenPercent { scale } => {
                if scale == 0.0 {
                    0
                } else {
                    p / 10
                }
            }
            ThetaPattern::Zero => 0,
        }
    }
}

/// Location vector for a pattern in dimension `p` with sample size `n`.
pub fn theta_vector<T: Scalar>(pattern: ThetaPattern, p: usize, n: usize) -> Result<Vector<T>> {
    let needed = pattern.support(p);
    if needed > p {
        return Err(Error::PatternTooLarge { needed, p });
    }
    let rate = ((p as f64).ln() / n as f64).sqrt();
    let mut theta = vec![T::zero(); p];
    match pattern {
        ThetaPattern::Sparse3 => {
            theta[0] = T::of(2.0);
            theta[1] = T::of(-2.0);
            theta[2] = T::of(3.0);
        }
        ThetaPattern::DenseQuarter => theta[..needed].fill(T::of(0.2)),
        ThetaPattern::LogSparse { kappa, .. } => theta[..needed].fill(T::of(kappa * rate)),
        ThetaPattern::TenPercent { scale } => theta[..needed].fill(T::of(scale * rate)),
        ThetaPattern::Zero => {}
    }
    Vector::new(theta)
}

#[derive(Debug, Clone)]
enum Root<T> {
    Identity,
    Diagonal(Vec<T>),
    Dense(Matrix<T>),
}

/// A distribution prepared for repeated sampling: the matrix root is computed
/// once.
#[derive(Debug, Clone)]
pub struct Generator<T> {
    model: Model,
    theta: Vec<T>,
    root: Root<T>,
}

impl<T: Scalar> Generator<T> {
    pub fn new(spec: &DistributionSpec<T>) -> Result<Self> {
        spec.model.validate()?;
        if spec.shape.dim() != spec.theta.len() {
            return Err(Error::DimensionMismatch {
                expected: spec.theta.len(),
                found: spec.shape.dim(),
            });
        }
        let shape = &spec.shape;
        let p = shape.dim();
        let diagonal = (0..p).all(|i| (0..p).all(|j| i == j || shape[(i, j)] == T::zero()));
        let root = if shape.is_identity() {
            Root::Identity
        } else if diagonal {
            let d = symmetric_sqrt(shape)?;
            Root::Diagonal((0..p).map(|i| d[(i, i)]).collect())
        } else {
            Root::Dense(symmetric_sqrt(shape)?)
        };
        Ok(Self { model: spec.model, theta: spec.theta.to_vec(), root })
    }

    pub fn p(&self) -> usize {
        self.theta.len()
    }

    /// Generator for the same model and shape centred at a different `theta`.
    pub fn with_theta(&self, theta: &[T]) -> Result<Self> {
        if theta.len() != self.p() {
            return Err(Error::DimensionMismatch { expected: self.p(), found: theta.len() });
        }
        Ok(Self { model: self.model, theta: theta.to_vec(), root: self.root.clone() })
    }

    fn fill_row(&self, seed: u64, row: usize, z: &mut [T], out: &mut [T]) {
        let mut rng = substream(seed, domain::DATA_ROW, row as u64);
        let p = self.p();
        let scale = match self.model {
            Model::Gaussian => {
                for v in z.iter_mut() {
                    *v = T::of(rng.sample::<f64, _>(StandardNormal));
                }
                1.0
            }
            Model::StudentT { df } => {
                let w: f64 = ChiSquared::new(df).expect("validated df").sample(&mut rng);
                for v in z.iter_mut() {
                    *v = T::of(rng.sample::<f64, _>(StandardNormal));
                }
                ((df - 2.0) / w).sqrt()
            }
            Model::Laplace => {
                let b = std::f64::consts::FRAC_1_SQRT_2;
                for v in z.iter_mut() {
                    let u = open_unit(&mut rng) - 0.5;
                    *v = T::of(-b * u.signum() * (1.0 - 2.0 * u.abs()).ln());
                }
                1.0
            }
        };
        let scale = T::of(scale);
        match &self.root {
            Root::Identity => out.copy_from_slice(z),
            Root::Diagonal(d) => {
                for ((o, &zv), &dv) in out.iter_mut().zip(z.iter()).zip(d) {
                    *o = dv * zv;
                }
            }
            Root::Dense(a) => a.mul_vec_into(z, out),
        }
        for j in 0..p {
            out[j] = self.theta[j] + scale * out[j];
        }
    }

    /// Draws `n` observations; deterministic in `(self, n, seed)` and
    /// independent of the rayon worker count.
    pub fn draw(&self, n: usize, seed: u64) -> Result<Sample<T>> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let p = self.p();
        let mut values = vec![T::zero(); n * p];
        values.par_chunks_mut(p).enumerate().for_each_init(
            || vec![T::zero(); p],
            |z, (i, out)| self.fill_row(seed, i, z, out),
        );
        Ok(Sample::from_flat_unchecked(n, p, values))
    }
}

/// One-off draw; prefer [`Generator`] when sampling repeatedly.
pub fn draw<T: Scalar>(spec: &DistributionSpec<T>, n: usize, seed: u64) -> Result<Sample<T>> {
    Generator::new(spec)?.draw(n, seed)
}
