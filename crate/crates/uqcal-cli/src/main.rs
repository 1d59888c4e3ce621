//! uqcal: regression calibration metrics and the controlled-miscalibration
//! benchmark over CSV prediction files.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error. All randomness sits
//! behind --seed; reports carry no timestamps, so identical invocations
//! produce byte-identical output.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod error;
mod files;
mod report;

#[derive(Parser)]
#[command(
    name = "uqcal",
    version,
    about = "Calibration metrics for regression uncertainty, with a seeded miscalibration benchmark"
)]
struct Cli {
    /// Base seed for every randomized operation (default 0)
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the metric suite over a prediction file and emit a JSON report
    Evaluate(EvaluateArgs),
    /// Apply a miscalibration scenario to a gaussian prediction file
    Perturb(PerturbArgs),
    /// Run the repeated miscalibration detection study
    Benchmark(BenchmarkArgs),
    /// Normalize evaluate reports across datasets and rank metric agreement
    Rank(RankArgs),
}

/// Metric configuration shared by the subcommands.
#[derive(Args)]
struct MetricFlags {
    /// Bin count for binned metrics (ENCE, UCE, QCE)
    #[arg(long, default_value_t = 10)]
    bins: usize,

    /// Nominal confidence level lambda for intervals, PICP, and CWC
    #[arg(long, default_value_t = 0.95)]
    confidence: f64,

    /// CWC coverage-penalty strength eta
    #[arg(long, default_value_t = 50.0)]
    eta: f64,

    /// Interval-score miscoverage rate alpha
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Input prediction CSV (header `y,y_hat,sigma` or `y,lower,upper`)
    #[arg(long)]
    input: PathBuf,

    /// Input format; inferred from the header when omitted
    #[arg(long, value_parser = ["gaussian", "interval"])]
    format: Option<String>,

    #[command(flatten)]
    metric_flags: MetricFlags,

    /// Report destination (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PerturbArgs {
    /// Input gaussian prediction CSV
    #[arg(long)]
    input: PathBuf,

    /// Scenario to apply: s1 (sigma x0.9), s2 (sigma ramp 0.9-1.1),
    /// s3 (mean x0.9), s4 (mean ramp 0.9-1.1, sigma ramp 1.1-0.9)
    #[arg(long)]
    scenario: String,

    /// Output prediction CSV (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Target source: a CSV of y values or synthetic:<name>:<n>; repeatable
    #[arg(long)]
    targets: Vec<String>,

    /// Scenario to inject (s1|s2|s3|s4)
    #[arg(long, default_value = "s4")]
    scenario: String,

    /// Number of seeded benchmark repetitions
    #[arg(long, default_value_t = 100)]
    repeats: usize,

    /// Relative-change threshold separating negligible from real changes
    #[arg(long, default_value_t = 0.03)]
    threshold: f64,

    #[command(flatten)]
    metric_flags: MetricFlags,

    /// Report destination (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RankArgs {
    /// Directory of evaluate reports (*.json) with matching configurations
    #[arg(long)]
    input: PathBuf,

    /// Report destination (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let seed = cli.seed;
    let result = match &cli.command {
        Command::Evaluate(args) => commands::evaluate(args, seed),
        Command::Perturb(args) => commands::perturb(args),
        Command::Benchmark(args) => commands::benchmark(args, seed.unwrap_or(0)),
        Command::Rank(args) => commands::rank(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code())
        }
    }
}
