//! Declarative Monte Carlo experiments with deterministic aggregation.
//!
//! Replication `r` of a scenario with seed `s` uses the seed
//! `derive_seed(s, [REPLICATION, r])`, from which the data and bootstrap seeds
//! are derived. Replication seeds do not depend on grid position, so grid
//! points (κ values, dimensions) share random numbers, and every method within
//! a replication sees the same sample. Replications run in parallel and are
//! folded in index order, so reports are identical for any worker count.

mod metrics;
mod report;
mod scenario;

use std::time::Instant;

use rayon::prelude::*;

pub use metrics::{bernoulli_stderr, MetricsRow, MetricsTable, COLUMNS};
pub use report::{emit_report, read_report_csv, ReportFormat};
pub use scenario::{Experiment, ScenarioSpec};

use metrics::{mean, mean_stderr, median, variance_ratio};

use crate::bootstrap::{bootstrap_mean, bootstrap_spatial_median};
use crate::data::Sample;
use crate::error::{Error, Result};
use crate::estimator::{bahadur_remainder, spatial_median, SolverConfig};
use crate::inference::{
    are_bootstrap, bh_fdr, fdr_screen_with_fit, global_test_cq, global_test_wpl,
    max_test_from_draws, sci_from_draws, CenterMethod, TestMethod,
};
use crate::rng::{derive_seed, domain, mix};
use crate::scalar::max_abs;
use crate::simdata::{theta_vector, ThetaPattern};
use crate::special::two_sided_p;

/// Seeds for one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplicationSeeds {
    pub data: u64,
    pub boot: u64,
}

impl ReplicationSeeds {
    pub fn new(scenario_seed: u64, replication: usize) -> Self {
        let rep = derive_seed(scenario_seed, &[domain::REPLICATION, replication as u64]);
        Self { data: mix(rep, domain::REPLICATION_DATA), boot: mix(rep, domain::REPLICATION_BOOT) }
    }
}

/// Runs `f` for every replication in parallel and returns the results in
/// replication order. The lowest-index failure is reported.
fn replicate<R: Send>(
    spec: &ScenarioSpec,
    f: impl Fn(ReplicationSeeds) -> Result<R> + Sync + Send,
) -> Result<Vec<R>> {
    let results: Vec<Result<R>> = (0..spec.replications)
        .into_par_iter()
        .map(|r| f(ReplicationSeeds::new(spec.seed, r)))
        .collect();
    results
        .into_iter()
        .enumerate()
        .map(|(r, res)| res.map_err(|e| Error::Replication { replication: r, source: Box::new(e) }))
        .collect()
}

fn expect(spec: &ScenarioSpec, experiment: Experiment) -> Result<()> {
    spec.validate()?;
    if spec.experiment != experiment {
        return Err(Error::InvalidArgument(format!(
            "scenario is a {} experiment, expected {}",
            spec.experiment.label(),
            experiment.label()
        )));
    }
    Ok(())
}

fn stamp(rows: &mut [MetricsRow], spec: &ScenarioSpec, start: Instant) {
    if spec.timing {
        let t = start.elapsed().as_secs_f64();
        for r in rows {
            r.runtime_seconds = Some(t);
        }
    }
}

/// Runs the experiment named in `spec`.
pub fn run(spec: &ScenarioSpec) -> Result<MetricsTable> {
    match spec.experiment {
        Experiment::Coverage => run_coverage(spec),
        Experiment::SizePower => run_size_power(spec),
        Experiment::Fdr => run_fdr(spec),
        Experiment::Are => run_are(spec),
        Experiment::Bahadur => run_bahadur(spec),
    }
}

/// Simultaneous-interval coverage and median width for the spatial median
/// and the sample mean, built on the same sample in each replication.
pub fn run_coverage(spec: &ScenarioSpec) -> Result<MetricsTable> {
    expect(spec, Experiment::Coverage)?;
    let start = Instant::now();
    let (n, p) = (spec.n, spec.p);
    let generator = spec.generator(n, p)?;
    let theta = theta_vector::<f64>(spec.theta_pattern, p, n)?;
    let config = SolverConfig::default();
    // Per replication and level: [(covered, width); 2] for median, mean.
    let reps = replicate(spec, |seeds| {
        let sample = generator.draw(n, seeds.data)?;
        let fit = spatial_median(&sample, &config)?;
        let med = bootstrap_spatial_median(&sample, &fit, spec.boot, seeds.boot, &config)?;
        let avg = bootstrap_mean(&sample, spec.boot, seeds.boot)?;
        let center = sample.mean();
        spec.levels
            .iter()
            .map(|&level| {
                let a = sci_from_draws(&fit.theta_hat, &med, level, CenterMethod::SpatialMedian)?;
                let b = sci_from_draws(&center, &avg, level, CenterMethod::Mean)?;
                Ok([(a.contains(&theta), a.width()), (b.contains(&theta), b.width())])
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let m = spec.replications;
    let mut rows = Vec::new();
    for (li, &level) in spec.levels.iter().enumerate() {
        for (k, method) in ["median", "mean"].into_iter().enumerate() {
            let covered = reps.iter().filter(|r| r[li][k].0).count() as f64 / m as f64;
            let widths: Vec<f64> = reps.iter().map(|r| r[li][k].1).collect();
            let mut row = MetricsRow::new(&spec.label(), Experiment::Coverage, method, n, p);
            row.level = Some(level);
            row.coverage = Some(covered);
            row.median_length = Some(median(&widths));
            row.mc_stderr = bernoulli_stderr(covered, m);
            rows.push(row);
        }
    }
    stamp(&mut rows, spec, start);
    Ok(MetricsTable { rows })
}

fn test_rejects(
    method: TestMethod,
    sample: &Sample<f64>,
    theta0: &[f64],
    levels: &[f64],
    boot: usize,
    seed: u64,
    config: &SolverConfig<f64>,
) -> Result<Vec<bool>> {
    match method {
        TestMethod::MedianMax => {
            let fit = spatial_median(sample, config)?;
            let draws = bootstrap_spatial_median(sample, &fit, boot, seed, config)?;
            levels
                .iter()
                .map(|&t| Ok(max_test_from_draws(&fit.theta_hat, theta0, t, &draws, method)?.reject))
                .collect()
        }
        TestMethod::MeanMax => {
            let draws = bootstrap_mean(sample, boot, seed)?;
            let center = sample.mean();
            levels
                .iter()
                .map(|&t| Ok(max_test_from_draws(&center, theta0, t, &draws, method)?.reject))
                .collect()
        }
        TestMethod::Wpl => levels.iter().map(|&t| Ok(global_test_wpl(sample, theta0, t)?.reject)).collect(),
        TestMethod::Cq => levels.iter().map(|&t| Ok(global_test_cq(sample, theta0, t)?.reject)).collect(),
    }
}

/// Rejection rates of `H₀: θ = 0` along `kappa_grid` with signals
/// `κ(ln p/n)^{1/2}` on the first `⌊c0·ln p⌋` coordinates. The `κ = 0` row
/// reports size, the others power.
pub fn run_size_power(spec: &ScenarioSpec) -> Result<MetricsTable> {
    expect(spec, Experiment::SizePower)?;
    let (n, p) = (spec.n, spec.p);
    let kappas = if spec.kappa_grid.is_empty() { vec![0.0] } else { spec.kappa_grid.clone() };
    let base = spec.generator(n, p)?;
    let theta0 = vec![0.0; p];
    let config = SolverConfig::default();
    let m = spec.replications;
    let mut rows = Vec::new();
    for &kappa in &kappas {
        let start = Instant::now();
        let theta = theta_vector::<f64>(ThetaPattern::LogSparse { c0: spec.c0, kappa }, p, n)?;
        let generator = base.with_theta(&theta)?;
        // Per replication: rejects[method][level].
        let reps = replicate(spec, |seeds| {
            let sample = generator.draw(n, seeds.data)?;
            spec.methods
                .iter()
                .map(|&method| test_rejects(method, &sample, &theta0, &spec.levels, spec.boot, seeds.boot, &config))
                .collect::<Result<Vec<_>>>()
        })?;
        let mut group = Vec::new();
        for (li, &level) in spec.levels.iter().enumerate() {
            for (mi, method) in spec.methods.iter().enumerate() {
                let rate = reps.iter().filter(|r| r[mi][li]).count() as f64 / m as f64;
                let mut row = MetricsRow::new(&spec.label(), Experiment::SizePower, method.label(), n, p);
                row.level = Some(level);
                row.kappa = Some(kappa);
                if kappa == 0.0 {
                    row.size = Some(rate);
                } else {
                    row.power = Some(rate);
                }
                row.mc_stderr = bernoulli_stderr(rate, m);
                group.push(row);
            }
        }
        stamp(&mut group, spec, start);
        rows.extend(group);
    }
    Ok(MetricsTable { rows })
}

/// `(FDP, true-positive proportion)` of a rejection set against the support
/// of `theta`. The proportion is `None` without signals.
fn fdp_and_power(rejected: &[usize], theta: &[f64]) -> (f64, Option<f64>) {
    let signals = theta.iter().filter(|&&t| t != 0.0).count();
    let false_rej = rejected.iter().filter(|&&j| theta[j] == 0.0).count();
    let fdp = false_rej as f64 / rejected.len().max(1) as f64;
    let power = (signals > 0).then(|| (rejected.len() - false_rej) as f64 / signals as f64);
    (fdp, power)
}

/// Normal p-values of the marginal t-statistics `√n·X̄_j/s_j`.
fn mean_p_values(sample: &Sample<f64>) -> Result<Vec<f64>> {
    let n = sample.n() as f64;
    let center = sample.mean();
    let mut ss = vec![0.0; sample.p()];
    for row in sample.rows() {
        for ((s, &x), &c) in ss.iter_mut().zip(row).zip(center.iter()) {
            *s += (x - c) * (x - c);
        }
    }
    ss.iter()
        .zip(center.iter())
        .enumerate()
        .map(|(j, (&s, &c))| {
            let sd = (s / (n - 1.0)).sqrt();
            if sd <= 0.0 {
                return Err(Error::ZeroScale(j));
            }
            Ok(two_sided_p(n.sqrt() * c / sd))
        })
        .collect()
}

/// Benjamini–Hochberg screening of `H₀j: θ_j = 0` with spatial-median
/// statistics (`median`) and with mean t-statistics (`mean`); `levels` are the
/// FDR targets.
pub fn run_fdr(spec: &ScenarioSpec) -> Result<MetricsTable> {
    expect(spec, Experiment::Fdr)?;
    if spec.n < 2 {
        return Err(Error::InvalidArgument("fdr experiment needs n >= 2".into()));
    }
    let start = Instant::now();
    let (n, p) = (spec.n, spec.p);
    let generator = spec.generator(n, p)?;
    let theta = theta_vector::<f64>(spec.theta_pattern, p, n)?;
    let theta0 = vec![0.0; p];
    let config = SolverConfig::default();
    // Per replication and level: [(fdp, power); 2] for median, mean.
    let reps = replicate(spec, |seeds| {
        let sample = generator.draw(n, seeds.data)?;
        let fit = spatial_median(&sample, &config)?;
        let mean_p = mean_p_values(&sample)?;
        spec.levels
            .iter()
            .map(|&alpha| {
                let med = fdr_screen_with_fit(&sample, &fit, &theta0, alpha)?;
                let avg = bh_fdr(&mean_p, alpha)?;
                Ok([fdp_and_power(&med.rejected, &theta), fdp_and_power(&avg.rejected, &theta)])
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut rows = Vec::new();
    for (li, &alpha) in spec.levels.iter().enumerate() {
        for (k, method) in ["median", "mean"].into_iter().enumerate() {
            let fdps: Vec<f64> = reps.iter().map(|r| r[li][k].0).collect();
            let powers: Option<Vec<f64>> = reps.iter().map(|r| r[li][k].1).collect();
            let mut row = MetricsRow::new(&spec.label(), Experiment::Fdr, method, n, p);
            row.level = Some(alpha);
            row.fdr = Some(mean(&fdps));
            row.fdr_power = powers.map(|v| mean(&v));
            row.mc_stderr = mean_stderr(&fdps);
            rows.push(row);
        }
    }
    stamp(&mut rows, spec, start);
    Ok(MetricsTable { rows })
}

/// Monte Carlo relative efficiency `Var(|X̄ − θ|_∞) / Var(|θ̂ − θ|_∞)` across
/// replications for every `(n, p)` in the grids. With `bootstrap_are`, a
/// second row per grid point averages the one-sample bootstrap estimate.
pub fn run_are(spec: &ScenarioSpec) -> Result<MetricsTable> {
    expect(spec, Experiment::Are)?;
    if spec.replications < 2 {
        return Err(Error::InvalidArgument("are experiment needs at least 2 replications".into()));
    }
    let n_grid = spec.n_grid();
    if n_grid.contains(&1) {
        return Err(Error::InvalidArgument("are experiment needs n >= 2 at every grid point".into()));
    }
    let config = SolverConfig::default();
    let mut rows = Vec::new();
    for &n in &n_grid {
        for &p in &spec.p_grid() {
            let start = Instant::now();
            let generator = spec.generator(n, p)?;
            let theta = theta_vector::<f64>(spec.theta_pattern, p, n)?;
            let reps = replicate(spec, |seeds| {
                let sample = generator.draw(n, seeds.data)?;
                let fit = spatial_median(&sample, &config)?;
                let dev = |c: &[f64]| max_abs(&c.iter().zip(theta.iter()).map(|(a, b)| a - b).collect::<Vec<_>>());
                let boot = if spec.bootstrap_are {
                    Some(are_bootstrap(&sample, spec.boot, seeds.boot)?.are_estimate)
                } else {
                    None
                };
                Ok((dev(&sample.mean()), dev(&fit.theta_hat), boot))
            })?;
            let u: Vec<f64> = reps.iter().map(|r| r.0).collect();
            let v: Vec<f64> = reps.iter().map(|r| r.1).collect();
            let (ratio, se) = variance_ratio(&u, &v);
            let mut group = Vec::new();
            let mut row = MetricsRow::new(&spec.label(), Experiment::Are, "monte_carlo", n, p);
            row.are_ratio = Some(ratio);
            row.mc_stderr = se;
            group.push(row);
            if spec.bootstrap_are {
                let est: Vec<f64> = reps.iter().filter_map(|r| r.2).collect();
                let mut row = MetricsRow::new(&spec.label(), Experiment::Are, "bootstrap", n, p);
                row.are_ratio = Some(mean(&est));
                row.mc_stderr = mean_stderr(&est);
                group.push(row);
            }
            stamp(&mut group, spec, start);
            rows.extend(group);
        }
    }
    Ok(MetricsTable { rows })
}

/// Mean max-norm remainder of the linear expansion of the spatial median at
/// each sample size in `n_grid`.
pub fn run_bahadur(spec: &ScenarioSpec) -> Result<MetricsTable> {
    expect(spec, Experiment::Bahadur)?;
    let p = spec.p;
    let config = SolverConfig::default();
    let mut rows = Vec::new();
    for &n in &spec.n_grid() {
        let start = Instant::now();
        let generator = spec.generator(n, p)?;
        let theta = theta_vector::<f64>(spec.theta_pattern, p, n)?;
        let rem = replicate(spec, |seeds| {
            let sample = generator.draw(n, seeds.data)?;
            let fit = spatial_median(&sample, &config)?;
            bahadur_remainder(&sample, &theta, &fit)
        })?;
        let mut row = MetricsRow::new(&spec.label(), Experiment::Bahadur, "median", n, p);
        row.remainder = Some(mean(&rem));
        row.mc_stderr = mean_stderr(&rem);
        let mut group = vec![row];
        stamp(&mut group, spec, start);
        rows.extend(group);
    }
    Ok(MetricsTable { rows })
}
