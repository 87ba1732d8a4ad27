mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

/// Spatial-median estimation and inference for high-dimensional location.
///
/// Results are written as JSON to stdout (or --out). Exit status is 0 on
/// success, 1 on usage errors and 2 when the computation fails, in which case
/// a JSON error object is written to stderr.
#[derive(Debug, Parser)]
#[command(name = "geomedian", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample spatial median with solver diagnostics.
    Estimate {
        #[command(flatten)]
        io: Io,
    },
    /// Geometric median-of-means.
    Gmom {
        #[command(flatten)]
        io: Io,
        /// Number of blocks.
        #[arg(long)]
        blocks: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Simultaneous confidence intervals from the multiplier bootstrap.
    Sci {
        #[command(flatten)]
        io: Io,
        /// Confidence level in (0, 1).
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[command(flatten)]
        boot: Boot,
        /// Centre of the intervals: median or mean.
        #[arg(long, value_enum, default_value_t = Method::Median)]
        method: Method,
    },
    /// Global test of H0: theta = theta0.
    Test {
        #[command(flatten)]
        io: Io,
        /// Significance level.
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[command(flatten)]
        null: Null,
        #[arg(long, value_enum, default_value_t = Method::Median)]
        method: Method,
        /// Bootstrap replicates (median and mean methods).
        #[arg(long, default_value_t = geomedian::bootstrap::DEFAULT_REPLICATES)]
        boot: usize,
        /// Required for the median and mean methods.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Coordinate-wise screening with Benjamini-Hochberg FDR control.
    Fdr {
        #[command(flatten)]
        io: Io,
        /// Target false discovery rate.
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[command(flatten)]
        null: Null,
    },
    /// Bootstrap estimate of the relative efficiency of mean to median.
    Are {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        boot: Boot,
        /// Also report the closed form for this model at the data dimension.
        #[arg(long, value_enum)]
        model: Option<AreModelArg>,
        /// Degrees of freedom for --model t.
        #[arg(long, default_value_t = 5.0)]
        df: f64,
    },
    /// Draw a synthetic sample as CSV.
    Generate {
        /// JSON with model, n, p and optionally rho and theta_pattern.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        workers: Workers,
    },
    /// Run a Monte Carlo scenario file.
    Simulate {
        /// Scenario JSON.
        #[arg(long)]
        config: PathBuf,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        workers: Workers,
    },
}

#[derive(Debug, Args)]
pub struct Io {
    /// Input CSV, one observation per row; "-" reads stdin.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output file (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub workers: Workers,
}

#[derive(Debug, Args)]
pub struct Workers {
    /// Worker threads (default: available parallelism). Results do not
    /// depend on this.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct Boot {
    /// Bootstrap replicates.
    #[arg(long, default_value_t = geomedian::bootstrap::DEFAULT_REPLICATES)]
    pub boot: usize,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct Null {
    /// Null value: "zeros" or a one-row CSV.
    #[arg(long, default_value = "zeros")]
    pub null: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Median,
    Mean,
    Wpl,
    Cq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AreModelArg {
    Gaussian,
    T,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => commands::report_error(&e),
    }
}
