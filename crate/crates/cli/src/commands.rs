use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use geomedian::inference::{
    fdr_screen, global_test_cq, global_test_mean, global_test_median, global_test_wpl,
};
use geomedian::{
    are_analytic, are_bootstrap, ar1_shape, draw, emit_report, gmom, read_csv, run_scenario, sci,
    spatial_median, theta_vector, with_workers, write_csv, AreModel, CenterMethod,
    DistributionSpec, Model, ReportFormat, Sample64, ScenarioSpec, ShapeMatrix64, SolverConfig,
    ThetaPattern,
};
use serde::Deserialize;
use serde_json::json;

use crate::output::{num, write, Format, Output, Table};
use crate::{AreModelArg, Command, Io, Method};

/// A problem with the invocation rather than with the data.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Prints `e` and maps it to the exit status.
pub fn report_error(e: &anyhow::Error) -> ExitCode {
    if let Some(u) = e.downcast_ref::<UsageError>() {
        eprintln!("error: {u}");
        return ExitCode::from(1);
    }
    let kind = e
        .chain()
        .find_map(|c| c.downcast_ref::<geomedian::Error>())
        .map(|g| g.kind())
        .unwrap_or("Io");
    let body = json!({ "error": { "kind": kind, "message": format!("{e:#}") } });
    eprintln!("{body}");
    ExitCode::from(2)
}

fn read_sample(path: &Path) -> Result<Sample64> {
    let (sample, _) = if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf)?;
        read_csv(buf.as_slice())
    } else {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        read_csv(file)
    }
    .with_context(|| format!("reading {}", path.display()))?;
    Ok(sample)
}

fn read_null(spec: &str, p: usize) -> Result<Vec<f64>> {
    if spec == "zeros" {
        return Ok(vec![0.0; p]);
    }
    let s = read_sample(Path::new(spec))?;
    if s.n() != 1 {
        return Err(usage(format!("--null file must have exactly one row, found {}", s.n())));
    }
    if s.p() != p {
        return Err(geomedian::Error::DimensionMismatch { expected: p, found: s.p() })
            .context("--null");
    }
    Ok(s.row(0).to_vec())
}

fn coordinate_table(header: Vec<&'static str>, columns: &[&[f64]]) -> Table {
    let mut t = Table::new(header);
    let len = columns.first().map_or(0, |c| c.len());
    for j in 0..len {
        let mut row = vec![j.to_string()];
        row.extend(columns.iter().map(|c| num(c[j])));
        t.push(row);
    }
    t
}

fn estimate(io: &Io) -> Result<Output> {
    let sample = read_sample(&io.input)?;
    let fit = spatial_median(&sample, &SolverConfig::default())?;
    let mut json = serde_json::to_value(&fit)?;
    json["n"] = json!(sample.n());
    json["p"] = json!(sample.p());
    let table = coordinate_table(vec!["coordinate", "theta_hat"], &[fit.theta_hat.as_slice()]);
    Ok(Output::Structured { json, table })
}

fn gmom_cmd(io: &Io, blocks: usize, seed: u64) -> Result<Output> {
    let sample = read_sample(&io.input)?;
    if blocks == 0 || blocks > sample.n() {
        return Err(usage(format!("--blocks must lie in 1..={}", sample.n())));
    }
    let theta = gmom(&sample, blocks, &SolverConfig::default(), seed)?;
    let json = json!({ "theta_hat": theta, "blocks": blocks, "seed": seed });
    let table = coordinate_table(vec!["coordinate", "theta_hat"], &[theta.as_slice()]);
    Ok(Output::Structured { json, table })
}

fn sci_cmd(io: &Io, level: f64, boot: usize, seed: u64, method: Method) -> Result<Output> {
    let center = match method {
        Method::Median => CenterMethod::SpatialMedian,
        Method::Mean => CenterMethod::Mean,
        _ => return Err(usage("sci supports --method median or mean")),
    };
    let sample = read_sample(&io.input)?;
    let r = sci(&sample, level, boot, seed, center)?;
    let mut json = serde_json::to_value(&r)?;
    json["method"] = serde_json::to_value(center)?;
    json["width"] = json!(r.width());
    let table = coordinate_table(
        vec!["coordinate", "center", "lower", "upper"],
        &[&r.center, &r.lower, &r.upper],
    );
    Ok(Output::Structured { json, table })
}

fn test_cmd(
    io: &Io,
    alpha: f64,
    null: &str,
    method: Method,
    boot: usize,
    seed: Option<u64>,
) -> Result<Output> {
    let seed = || seed.ok_or_else(|| usage(format!("--seed is required for --method {method:?}").to_lowercase()));
    let sample = read_sample(&io.input)?;
    let theta0 = read_null(null, sample.p())?;
    let r = match method {
        Method::Median => global_test_median(&sample, &theta0, alpha, boot, seed()?)?,
        Method::Mean => global_test_mean(&sample, &theta0, alpha, boot, seed()?)?,
        Method::Wpl => global_test_wpl(&sample, &theta0, alpha)?,
        Method::Cq => global_test_cq(&sample, &theta0, alpha)?,
    };
    let mut json = serde_json::to_value(&r)?;
    json["alpha"] = json!(alpha);
    let mut table = Table::new(vec!["method", "statistic", "critical_value", "p_value", "reject"]);
    table.push(vec![
        r.method.label().to_string(),
        num(r.statistic),
        num(r.critical_value),
        num(r.p_value),
        r.reject.to_string(),
    ]);
    Ok(Output::Structured { json, table })
}

fn fdr_cmd(io: &Io, alpha: f64, null: &str) -> Result<Output> {
    let sample = read_sample(&io.input)?;
    let theta0 = read_null(null, sample.p())?;
    let r = fdr_screen(&sample, &theta0, alpha)?;
    let json = serde_json::to_value(&r)?;
    let mut table = Table::new(vec!["coordinate", "t_stat", "p_value", "rejected"]);
    for (j, (t, p)) in r.t_stats.iter().zip(&r.p_values).enumerate() {
        table.push(vec![j.to_string(), num(*t), num(*p), r.rejected.contains(&j).to_string()]);
    }
    Ok(Output::Structured { json, table })
}

fn are_cmd(io: &Io, boot: usize, seed: u64, model: Option<AreModelArg>, df: f64) -> Result<Output> {
    let sample = read_sample(&io.input)?;
    let mut report = are_bootstrap(&sample, boot, seed)?;
    if let Some(m) = model {
        let m = match m {
            AreModelArg::Gaussian => AreModel::Gaussian,
            AreModelArg::T => AreModel::StudentT { df },
        };
        report.are_analytic = Some(are_analytic(m, sample.p())?);
    }
    let json = serde_json::to_value(&report)?;
    let mut table = Table::new(vec!["are_estimate", "are_analytic", "model"]);
    table.push(vec![
        num(report.are_estimate),
        report.are_analytic.map(num).unwrap_or_default(),
        report.model.clone(),
    ]);
    Ok(Output::Structured { json, table })
}

/// Distribution part of a scenario file; other fields are ignored so a
/// scenario file can be reused.
#[derive(Debug, Deserialize)]
struct GenerateConfig {
    model: Model,
    #[serde(default)]
    rho: f64,
    n: usize,
    p: usize,
    #[serde(default = "zero_pattern")]
    theta_pattern: ThetaPattern,
}

fn zero_pattern() -> ThetaPattern {
    ThetaPattern::Zero
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(geomedian::Error::from)
        .with_context(|| format!("parsing {}", path.display()))
}

fn generate(config: &Path, seed: u64) -> Result<Output> {
    let cfg: GenerateConfig = read_json(config)?;
    let shape = if cfg.rho == 0.0 { ShapeMatrix64::identity(cfg.p) } else { ar1_shape(cfg.p, cfg.rho)? };
    let theta = theta_vector(cfg.theta_pattern, cfg.p, cfg.n)?;
    let sample = draw(&DistributionSpec { model: cfg.model, theta, shape }, cfg.n, seed)?;
    let mut buf = Vec::new();
    write_csv(&sample, None, &mut buf)?;
    Ok(Output::Text(String::from_utf8(buf)?))
}

fn simulate(config: &Path, seed: Option<u64>, format: Format) -> Result<Output> {
    let mut spec: ScenarioSpec = read_json(config)?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    let table = run_scenario(&spec)?;
    let format = match format {
        Format::Json => ReportFormat::Json,
        Format::Csv => ReportFormat::Csv,
        Format::Markdown => ReportFormat::Markdown,
    };
    Ok(Output::Text(emit_report(&table, format)?))
}

fn execute(workers: Option<usize>, f: impl FnOnce() -> Result<Output> + Send) -> Result<Output> {
    if workers == Some(0) {
        return Err(usage("--workers must be at least 1"));
    }
    with_workers(workers.unwrap_or(0), f)?
}

pub fn run(command: Command) -> Result<()> {
    let (output, format, out) = match &command {
        Command::Estimate { io } => (execute(io.workers.workers, || estimate(io))?, io.format, &io.out),
        Command::Gmom { io, blocks, seed } => {
            (execute(io.workers.workers, || gmom_cmd(io, *blocks, *seed))?, io.format, &io.out)
        }
        Command::Sci { io, level, boot, method } => (
            execute(io.workers.workers, || sci_cmd(io, *level, boot.boot, boot.seed, *method))?,
            io.format,
            &io.out,
        ),
        Command::Test { io, alpha, null, method, boot, seed } => (
            execute(io.workers.workers, || test_cmd(io, *alpha, &null.null, *method, *boot, *seed))?,
            io.format,
            &io.out,
        ),
        Command::Fdr { io, alpha, null } => {
            (execute(io.workers.workers, || fdr_cmd(io, *alpha, &null.null))?, io.format, &io.out)
        }
        Command::Are { io, boot, model, df } => (
            execute(io.workers.workers, || are_cmd(io, boot.boot, boot.seed, *model, *df))?,
            io.format,
            &io.out,
        ),
        Command::Generate { config, seed, out, workers } => {
            (execute(workers.workers, || generate(config, *seed))?, Format::Csv, out)
        }
        Command::Simulate { config, seed, out, format, workers } => {
            (execute(workers.workers, || simulate(config, *seed, *format))?, *format, out)
        }
    };
    write(&output.render(format)?, out.as_deref())
}
