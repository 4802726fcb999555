//! atfmrisk: batch pipeline from ATFM regulation data to sector severity maps.
//!
//! Subcommands cover the pipeline stages: `synth` generates a seeded test
//! scenario, `fit` estimates the delay-cost model from flight data, `risk`
//! computes per-sector economic risk, `severity` classifies it, and `export`
//! writes a GeoJSON severity map.
//!
//! Exit codes: 0 success, 2 input or usage error, 3 numerical failure.

mod commands;
mod report;
mod table;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "atfmrisk",
    version,
    about = "Economic risk analytics for ATFM regulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the delay-cost model from flight-level data.
    Fit(FitArgs),
    /// Compute per-sector economic risk over calendar horizons.
    Risk(RiskArgs),
    /// Classify risk values into severity classes.
    Severity(SeverityArgs),
    /// Write a GeoJSON severity map.
    Export(ExportArgs),
    /// Generate a seeded synthetic scenario.
    Synth(SynthArgs),
}

#[derive(clap::Args)]
struct FitArgs {
    /// flights.csv with per-flight ATFM delays.
    #[arg(long)]
    flights: PathBuf,
    /// aircraft.csv with MTOW per type.
    #[arg(long)]
    aircraft: PathBuf,
    /// regulations.csv, used to join regulation reasons (needed for
    /// the ols/gbt methods).
    #[arg(long)]
    regulations: Option<PathBuf>,
    /// Output model.json path.
    #[arg(long)]
    out: PathBuf,
    /// Seed for the train/test split.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Training fraction of the split.
    #[arg(long, default_value_t = 0.75)]
    split: f64,
    /// z-score threshold on average cost.
    #[arg(long, default_value_t = 3.0)]
    zcost: f64,
    /// z-score threshold on average delay.
    #[arg(long, default_value_t = 5.0)]
    zdelay: f64,
    #[arg(long, value_enum, default_value_t = FitMethod::Quad)]
    method: FitMethod,
    /// Number of quantile bins of the error model.
    #[arg(long, default_value_t = 10)]
    bins: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FitMethod {
    Quad,
    Ols,
    Gbt,
    All,
}

#[derive(clap::Args)]
struct RiskArgs {
    #[arg(long)]
    regulations: PathBuf,
    #[arg(long)]
    openings: PathBuf,
    /// model.json; the built-in default model is used when omitted.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, value_enum)]
    period: PeriodArg,
    /// Year or year range, e.g. 2016 or 2016-2018.
    #[arg(long)]
    range: String,
    #[arg(long)]
    out: PathBuf,
    /// How the per-sector average delay weighs regulations.
    #[arg(long, value_enum, default_value_t = AdModeArg::Flight)]
    ad_mode: AdModeArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PeriodArg {
    Month,
    Quarter,
    Year,
    #[value(name = "quarter-across-years")]
    QuarterAcrossYears,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AdModeArg {
    /// Total delay over total delayed flights.
    Flight,
    /// Mean of per-regulation averages.
    Regulation,
}

#[derive(clap::Args)]
struct SeverityArgs {
    /// risk.csv produced by the risk subcommand.
    #[arg(long)]
    risk: PathBuf,
    /// Custom percentile bands (JSON); the five-level default otherwise.
    #[arg(long)]
    bands: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct ExportArgs {
    /// severity.csv produced by the severity subcommand.
    #[arg(long)]
    severity: PathBuf,
    /// sectors.geojson with the sector footprints.
    #[arg(long)]
    sectors: PathBuf,
    /// risk.csv, used to attach cost_std_eur to the features.
    #[arg(long)]
    risk: Option<PathBuf>,
    /// Horizon label to export when severity.csv holds several.
    #[arg(long)]
    horizon: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scenario parameter overrides (JSON).
    #[arg(long)]
    params: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

/// Pipeline failure with its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid input: exit 2.
    Input(String),
    /// A fit or numerical routine failed: exit 3.
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numeric(m) => m,
        }
    }
}

fn configure_threads() {
    // ATFMRISK_THREADS caps internal parallelism; 0 or unset means auto.
    if let Ok(value) = std::env::var("ATFMRISK_THREADS") {
        match value.trim().parse::<usize>() {
            Ok(0) => {}
            Ok(n) => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            Err(_) => eprintln!("warning: ignoring non-numeric ATFMRISK_THREADS={value:?}"),
        }
    }
}

fn main() {
    configure_threads();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(args) => commands::fit::run(&args),
        Command::Risk(args) => commands::risk::run(&args),
        Command::Severity(args) => commands::severity::run(&args),
        Command::Export(args) => commands::export::run(&args),
        Command::Synth(args) => commands::synth::run(&args),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.message());
        std::process::exit(e.exit_code());
    }
}
