//! `frobenius-limit`: exact Frobenius numbers, ensemble sampling, density
//! tables and verification reports.
//!
//! Settings resolve as command-line flags, then `FROB_*` environment
//! variables, then a `key = value` file given by `--config`.
//!
//! Exit codes: 0 success, 1 failed verification or runtime error, 2 invalid
//! input or configuration, 3 algorithm precondition not met.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;

use config::ConfigFile;

#[derive(Debug, Parser)]
#[command(name = "frobenius-limit", version, about = "Frobenius numbers of random triples and their limit laws")]
pub struct Cli {
    /// Worker threads (default: all cores). Output never depends on it.
    #[arg(long, global = true, env = "FROB_THREADS")]
    pub threads: Option<usize>,

    /// `key = value` settings file, consulted after flags and environment.
    #[arg(long, global = true, env = "FROB_CONFIG")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Frobenius number of a tuple.
    Frobenius(FrobeniusArgs),
    /// Sample an ensemble and write per-draw statistics.
    Sample(SampleArgs),
    /// Continued fraction, convergents and stopping index of a rational.
    Cf(CfArgs),
    /// Table of the limiting density of F / sqrt(a1 a2 a3) and its CDF.
    Density(DensityArgs),
    /// Run a verification suite and write a JSON report.
    Verify(VerifyArgs),
    /// Summarise a sample CSV.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Apery,
    Rotation,
    Sieve,
    Auto,
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Algorithm as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Args)]
pub struct FrobeniusArgs {
    /// Generators a1 ... an.
    #[arg(required = true, num_args = 1..)]
    pub generators: Vec<u64>,
    #[arg(long, value_enum)]
    pub algorithm: Option<Algorithm>,
    /// Ensemble bound for the normalised value F / N^(1 + 1/(n-1)).
    #[arg(long = "n", env = "FROB_N")]
    pub n_bound: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long = "n", env = "FROB_N")]
    pub n_bound: Option<u64>,
    #[arg(long, env = "FROB_COUNT")]
    pub count: Option<usize>,
    #[arg(long, env = "FROB_SEED")]
    pub seed: Option<u64>,
    /// Half-width of the quotient window around the stopping index.
    #[arg(long, env = "FROB_WINDOW")]
    pub window: Option<usize>,
    /// QN (setwise coprime) or QN0 (additionally gcd(a1, a3) = 1).
    #[arg(long)]
    pub ensemble: Option<String>,
    /// Required leading quotients of rho, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub prefix: Option<Vec<u64>>,
    /// Skip Frobenius numbers and compute continued-fraction fields only.
    #[arg(long)]
    pub cf_only: bool,
    /// csv: records (default); json: summary only.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where to write the JSON summary alongside CSV records.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CfArgs {
    /// A rational in (0, 1) written as num/den.
    pub value: String,
    /// Stopping radius R: report the smallest s with q_s >= R.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, env = "FROB_WINDOW")]
    pub window: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// prop1, prop2, prop3, kloosterman, phi-box, weighted-w, selmer, lemmas or all.
    pub target: String,
    #[arg(long, env = "FROB_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub x1: Option<f64>,
    #[arg(long)]
    pub x2: Option<f64>,
    #[arg(long)]
    pub y1: Option<f64>,
    #[arg(long)]
    pub y2: Option<f64>,
    /// Radius R of the counting suites.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub z: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Sample CSV written by `sample`.
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// An error with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn invalid(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 2, error: error.into() }
    }

    pub fn precondition(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 3, error: error.into() }
    }

    pub fn runtime(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 1, error: error.into() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path).map_err(Failure::invalid)?,
        None => ConfigFile::default(),
    };
    let threads = cfg.pick_opt(cli.threads, "threads").map_err(Failure::invalid)?;
    if let Some(n) = threads {
        if n == 0 {
            return Err(Failure::invalid(anyhow::anyhow!("--threads must be positive")));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(Failure::runtime)?;
    }
    match &cli.command {
        Command::Frobenius(a) => commands::frobenius(a, &cfg),
        Command::Sample(a) => commands::sample(a, &cfg),
        Command::Cf(a) => commands::cf(a, &cfg),
        Command::Density(a) => commands::density(a, &cfg),
        Command::Verify(a) => commands::verify(a, &cfg),
        Command::Report(a) => commands::report(a),
    }
}
