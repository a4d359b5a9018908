//! Command-line interface for analyzing completely positive maps.
//!
//! Six subcommands cover the library surface: `check` reports the channel
//! properties of a map, `fixed` computes its fixed-point space, `decompose`
//! finds the anchor projections of a unital map, `classify-qubit` names the
//! fixed-point algebra of a unital trace-preserving qubit channel,
//! `phi-infinity` iterates a map on a comparable projection, and `wavelet`
//! compresses a filter bank to a finite-dimensional channel.
//!
//! Exit codes: 0 on success, 2 for parse or validation problems, 3 when a
//! mathematical precondition fails (not completely positive, not unital,
//! not monotone, and so on).

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error as ThisError;

use cpmap::jsonio::{self, ChannelRepr};
use cpmap::{Error, Tolerance};

#[derive(Parser)]
#[command(
    name = "cpmap",
    version,
    about = "Analyze completely positive maps on finite-dimensional spaces"
)]
struct Cli {
    /// Seed for the randomized anchor search in `decompose`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Absolute tolerance: iteration convergence and matrix equality.
    #[arg(long, global = true)]
    abs_eps: Option<f64>,

    /// Relative tolerance: rank cutoffs and subspace comparisons.
    #[arg(long, global = true)]
    rel_eps: Option<f64>,

    /// Slack for positive-semidefiniteness tests.
    #[arg(long, global = true)]
    psd_slack: Option<f64>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,

    /// In `decompose`, re-certify minimality of every anchor against a
    /// fresh candidate pool.
    #[arg(long, global = true)]
    exhaustive: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Report complete positivity, unitality, and trace preservation.
    Check {
        /// Channel or superoperator JSON file.
        file: PathBuf,
    },
    /// Compute the fixed-point space; when the map is a unital
    /// trace-preserving channel, compare it with the Kraus commutant.
    Fixed {
        /// Channel or superoperator JSON file.
        file: PathBuf,
    },
    /// Decompose a unital map into irreducible summands via anchor
    /// projections.
    Decompose {
        /// Channel or superoperator JSON file.
        file: PathBuf,
    },
    /// Classify the fixed-point algebra of a unital trace-preserving
    /// qubit channel.
    ClassifyQubit {
        /// Channel or superoperator JSON file.
        file: PathBuf,
    },
    /// Iterate the map on a projection comparable with its image and
    /// report the limit.
    PhiInfinity {
        /// Channel or superoperator JSON file.
        file: PathBuf,
        /// Projection matrix JSON file.
        projection: PathBuf,
        /// Iteration cap.
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
    },
    /// Compress a filter bank to a channel on the span of the lowest
    /// Fourier exponents.
    Wavelet {
        /// Filter bank JSON file.
        file: PathBuf,
        /// Dimension of the compression space.
        #[arg(long)]
        dim: usize,
        /// Write the compressed channel JSON to this file instead of
        /// embedding it in the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, ThisError)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 2,
            CliError::Core(e) if e.is_math_precondition() => 3,
            CliError::Core(_) => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let tol = build_tolerance(cli)?;
    match &cli.command {
        Command::Check { file } => {
            let input = jsonio::map_input_from_json(&read(file)?)?;
            let rep = report::check(&input, &tol)?;
            emit(cli, &rep, report::render_check)
        }
        Command::Fixed { file } => {
            let input = jsonio::map_input_from_json(&read(file)?)?;
            let ch = report::require_channel(input, &tol)?;
            let rep = report::fixed(&ch, &tol)?;
            emit(cli, &rep, report::render_fixed)
        }
        Command::Decompose { file } => {
            let input = jsonio::map_input_from_json(&read(file)?)?;
            let ch = report::require_channel(input, &tol)?;
            let rep = report::decompose(&ch, cli.seed, cli.exhaustive, &tol)?;
            emit(cli, &rep, report::render_decompose)
        }
        Command::ClassifyQubit { file } => {
            let input = jsonio::map_input_from_json(&read(file)?)?;
            let ch = report::require_channel(input, &tol)?;
            let rep = report::classify_qubit(&ch, &tol)?;
            emit(cli, &rep, report::render_qubit)
        }
        Command::PhiInfinity { file, projection, max_iter } => {
            let input = jsonio::map_input_from_json(&read(file)?)?;
            let ch = report::require_channel(input, &tol)?;
            let p = jsonio::matrix_from_json(&read(projection)?)?;
            let rep = report::run_phi_infinity(&ch, &p, *max_iter, &tol)?;
            emit(cli, &rep, report::render_phi_infinity)
        }
        Command::Wavelet { file, dim, out } => {
            let fb = jsonio::filter_bank_from_json(&read(file)?)?;
            let (mut rep, channel) = report::wavelet(&fb, *dim, &tol)?;
            match out {
                Some(path) => {
                    write(path, &(jsonio::channel_to_json(&channel) + "\n"))?;
                    rep.out = Some(path.display().to_string());
                }
                None => rep.channel = Some(ChannelRepr::from_channel(&channel)),
            }
            emit(cli, &rep, report::render_wavelet)
        }
    }
}

fn build_tolerance(cli: &Cli) -> Result<Tolerance, CliError> {
    let base = Tolerance::default();
    Ok(Tolerance::new(
        cli.abs_eps.unwrap_or(base.abs_eps),
        cli.rel_eps.unwrap_or(base.rel_eps),
        cli.psd_slack.unwrap_or(base.psd_slack),
    )?)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn write(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn emit<T: serde::Serialize>(
    cli: &Cli,
    value: &T,
    render: impl Fn(&T) -> String,
) -> Result<(), CliError> {
    match cli.output {
        Output::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(value).expect("report serialization cannot fail")
            );
        }
        Output::Text => print!("{}", render(value)),
    }
    Ok(())
}
