//! `wavedeconv` command-line front end.
//!
//! Exit codes: 0 when every requested assertion holds, 1 when one fails, 2 for
//! usage and input errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wavedeconv::{Method, TestSignal};

#[derive(Debug, Parser)]
#[command(name = "wavedeconv", version, about = "Wavelet deconvolution with random filters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Blur a test signal with a drawn filter and add noise.
    Simulate(SimulateArgs),
    /// Run an estimator on simulated (or external) data.
    Estimate(EstimateArgs),
    /// Monte Carlo benchmark over a grid read from a TOML file.
    Bench(BenchArgs),
    /// Monte Carlo diagnostics of the filter-law conditions.
    CheckFilter(CheckFilterArgs),
    /// Empirical convergence slope of root-MSE against n.
    Rate(RateArgs),
}

#[derive(Debug, Args)]
struct OutDir {
    /// Output directory.
    #[arg(long, env = "WAVEDECONV_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_parser = parse_target)]
    target: TestSignal,
    #[arg(long, default_value_t = 4096, value_parser = parse_grid)]
    n: usize,
    #[arg(long, value_parser = positive)]
    nu: f64,
    /// Tail parameter of the scale law.
    #[arg(long, value_parser = positive, required_unless_present = "lambda", conflicts_with = "lambda")]
    alpha: Option<f64>,
    /// Fixed filter scale instead of a random one.
    #[arg(long, value_parser = positive)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = wavedeconv::filters::DEFAULT_MEAN_LAMBDA, value_parser = positive)]
    mean_lambda: f64,
    #[arg(long, value_parser = positive)]
    rsnr: f64,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long, value_parser = parse_method)]
    method: Method,
    /// Observation JSON written by `simulate`.
    #[arg(long)]
    obs: PathBuf,
    /// Filter JSON written by `simulate`.
    #[arg(long)]
    filter: PathBuf,
    /// Truth JSON; prints the MSE when given.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Degree of ill-posedness; defaults to the filter's own.
    #[arg(long, value_parser = non_negative)]
    nu: Option<f64>,
    /// Tail parameter used by D.
    #[arg(long, value_parser = positive)]
    alpha: Option<f64>,
    /// Threshold constant of D.
    #[arg(long, value_parser = positive)]
    eta: Option<f64>,
    /// Threshold constant of R and hybrid.
    #[arg(long, value_parser = positive)]
    eta_prime: Option<f64>,
    /// Absolute threshold of the fixed method (default `σ√(2 ln n / n)`).
    #[arg(long, value_parser = non_negative)]
    threshold: Option<f64>,
    /// Scale constant K of the level formulas.
    #[arg(long, value_parser = positive, conflicts_with = "mean_lambda")]
    filter_scale: Option<f64>,
    /// Typical filter scale used to derive K when --filter-scale is absent.
    #[arg(long, value_parser = positive)]
    mean_lambda: Option<f64>,
    /// Projection level of the linear estimator.
    #[arg(long)]
    level: Option<i32>,
    #[arg(long, value_parser = positive)]
    s: Option<f64>,
    #[arg(long, value_parser = positive)]
    p: Option<f64>,
    #[arg(long, value_parser = positive)]
    q: Option<f64>,
    #[arg(long, value_parser = positive)]
    rho: Option<f64>,
    /// Fail (exit 1) when the MSE exceeds this value; needs --truth.
    #[arg(long, value_parser = non_negative, requires = "truth")]
    max_mse: Option<f64>,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// TOML grid definition.
    #[arg(long)]
    config: PathBuf,
    /// Skip the per-cell SVG plots.
    #[arg(long)]
    no_plots: bool,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Debug, Args)]
pub struct CheckFilterArgs {
    #[arg(long, value_parser = positive)]
    nu: f64,
    #[arg(long, value_parser = positive, required_unless_present = "lambda", conflicts_with = "lambda")]
    alpha: Option<f64>,
    #[arg(long, value_parser = positive)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = wavedeconv::filters::DEFAULT_MEAN_LAMBDA, value_parser = positive)]
    mean_lambda: f64,
    /// Filter draws; the tail fit is noisy below about 10^4.
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 10)]
    max_level: u32,
    #[arg(long, default_value_t = 0.5, value_parser = positive)]
    slope_tol: f64,
    #[arg(long, default_value_t = 0.25, value_parser = positive)]
    tail_tol: f64,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    /// Smoothness of the power-law target.
    #[arg(long, value_parser = positive)]
    s: f64,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    amplitude: f64,
    /// Finest level carrying target energy.
    #[arg(long, default_value_t = 8)]
    top_level: i32,
    #[arg(long, value_parser = non_negative)]
    nu: f64,
    /// Fixed Gamma filter scale; omit for no blur.
    #[arg(long, value_parser = positive)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = 1.0, value_parser = non_negative)]
    sigma: f64,
    /// Comma-separated grid sizes.
    #[arg(long, value_delimiter = ',', default_value = "1024,2048,4096,8192,16384")]
    n_grid: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value = "linear", value_parser = parse_method)]
    method: Method,
    /// Freeze the linear projection level.
    #[arg(long)]
    level: Option<i32>,
    /// Regress against log(n / (log n)^{1+1/alpha}) instead of log n.
    #[arg(long, value_parser = positive)]
    log_alpha: Option<f64>,
    #[arg(long, default_value_t = 200)]
    bootstrap: usize,
    /// Fail (exit 1) when |slope − reference| exceeds this.
    #[arg(long, value_parser = positive)]
    tolerance: Option<f64>,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    out: OutDir,
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a positive number, got {s}"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a non-negative number, got {s}"))
    }
}

fn parse_grid(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n.is_power_of_two() && (64..=1 << 20).contains(&n) {
        Ok(n)
    } else {
        Err(format!("n must be a power of two in 64..=2^20, got {n}"))
    }
}

fn parse_target(s: &str) -> Result<TestSignal, String> {
    s.parse().map_err(|e: wavedeconv::Error| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: wavedeconv::Error| e.to_string())
}

/// What a command concluded.
pub enum Outcome {
    Pass,
    Fail(String),
}

/// Command failures that are not assertion failures.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(wavedeconv::Error),
}

impl From<wavedeconv::Error> for CliError {
    fn from(e: wavedeconv::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Lib(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Estimate(a) => commands::estimate(a),
        Command::Bench(a) => commands::bench(a),
        Command::CheckFilter(a) => commands::check_filter(a),
        Command::Rate(a) => commands::rate(a),
    };
    match res {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail(msg)) => {
            eprintln!("assertion failed: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
