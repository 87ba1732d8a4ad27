use serde::{Deserialize, Serialize};

use super::scenario::Experiment;

/// Column names in report order.
pub const COLUMNS: [&str; 17] = [
    "scenario",
    "experiment",
    "level",
    "method",
    "n",
    "p",
    "kappa",
    "coverage",
    "median_length",
    "size",
    "power",
    "fdr",
    "fdr_power",
    "are_ratio",
    "remainder",
    "mc_stderr",
    "runtime_seconds",
];

/// One aggregated result. Metrics that do not apply to the experiment are
/// `None`. `mc_stderr` is the Monte Carlo standard error of the row's primary
/// metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub scenario: String,
    pub experiment: Experiment,
    pub level: Option<f64>,
    pub method: String,
    pub n: usize,
    pub p: usize,
    pub kappa: Option<f64>,
    pub coverage: Option<f64>,
    pub median_length: Option<f64>,
    pub size: Option<f64>,
    pub power: Option<f64>,
    pub fdr: Option<f64>,
    pub fdr_power: Option<f64>,
    pub are_ratio: Option<f64>,
    pub remainder: Option<f64>,
    pub mc_stderr: f64,
    pub runtime_seconds: Option<f64>,
}

impl MetricsRow {
    pub(crate) fn new(scenario: &str, experiment: Experiment, method: &str, n: usize, p: usize) -> Self {
        Self {
            scenario: scenario.to_string(),
            experiment,
            level: None,
            method: method.to_string(),
            n,
            p,
            kappa: None,
            coverage: None,
            median_length: None,
            size: None,
            power: None,
            fdr: None,
            fdr_power: None,
            are_ratio: None,
            remainder: None,
            mc_stderr: 0.0,
            runtime_seconds: None,
        }
    }

    /// Cell text for `column`, empty for `None`.
    pub fn cell(&self, column: &str) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        match column {
            "scenario" => self.scenario.clone(),
            "experiment" => self.experiment.label().to_string(),
            "level" => opt(self.level),
            "method" => self.method.clone(),
            "n" => self.n.to_string(),
            "p" => self.p.to_string(),
            "kappa" => opt(self.kappa),
            "coverage" => opt(self.coverage),
            "median_length" => opt(self.median_length),
            "size" => opt(self.size),
            "power" => opt(self.power),
            "fdr" => opt(self.fdr),
            "fdr_power" => opt(self.fdr_power),
            "are_ratio" => opt(self.are_ratio),
            "remainder" => opt(self.remainder),
            "mc_stderr" => self.mc_stderr.to_string(),
            "runtime_seconds" => opt(self.runtime_seconds),
            _ => String::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MetricsTable {
    pub rows: Vec<MetricsRow>,
}

impl MetricsTable {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn extend(&mut self, other: MetricsTable) {
        self.rows.extend(other.rows);
    }

    /// First row matching `method` and, when given, `level` and `kappa`.
    pub fn find(&self, method: &str, level: Option<f64>, kappa: Option<f64>) -> Option<&MetricsRow> {
        self.rows.iter().find(|r| {
            r.method == method
                && level.is_none_or(|l| r.level == Some(l))
                && kappa.is_none_or(|k| r.kappa == Some(k))
        })
    }
}

/// Standard error of a Bernoulli rate `r` estimated from `m` draws.
pub fn bernoulli_stderr(rate: f64, m: usize) -> f64 {
    (rate * (1.0 - rate) / m as f64).sqrt()
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean of `xs` (0 for a single value).
pub(crate) fn mean_stderr(xs: &[f64]) -> f64 {
    let m = xs.len();
    if m < 2 {
        return 0.0;
    }
    let mu = mean(xs);
    let var = xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (m - 1) as f64;
    (var / m as f64).sqrt()
}

/// Median with the midpoint rule for even lengths.
pub(crate) fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

/// `Var(u)/Var(v)` across paired replications and its delta-method standard
/// error.
pub(crate) fn variance_ratio(u: &[f64], v: &[f64]) -> (f64, f64) {
    let m = u.len() as f64;
    let (mu, mv) = (mean(u), mean(v));
    let du: Vec<f64> = u.iter().map(|x| (x - mu).powi(2)).collect();
    let dv: Vec<f64> = v.iter().map(|x| (x - mv).powi(2)).collect();
    let (a, b) = (mean(&du), mean(&dv));
    let ratio = a / b;
    let var_a = du.iter().map(|d| (d - a).powi(2)).sum::<f64>() / m;
    let var_b = dv.iter().map(|d| (d - b).powi(2)).sum::<f64>() / m;
    let cov = du.iter().zip(&dv).map(|(x, y)| (x - a) * (y - b)).sum::<f64>() / m;
    let rel = (var_a / (a * a) + var_b / (b * b) - 2.0 * cov / (a * b)) / m;
    (ratio, ratio * rel.max(0.0).sqrt())
}
