//! `projspec`: characteristic polynomials, equivalence reports and curve
//! samples for tuples of complex matrices stored as JSON.
//!
//! Exit codes: 0 success, 1 report flagged, 2 input error, 3 numeric failure.

mod commands;
mod document;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;

use commands::{Format, Kind, RunConfig};
use document::TupleDocument;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numeric(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<projspec::Error> for CliError {
    fn from(e: projspec::Error) -> Self {
        use projspec::Error as E;
        match e {
            E::InvalidInput(_) | E::DimensionMismatch { .. } | E::ArityMismatch { .. } => Self::Input(e.to_string()),
            other => Self::Numeric(other.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Input(_) | Self::Io(_) => 2,
            Self::Numeric(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "projspec", version, about = "Joint spectra of matrix tuples")]
struct Cli {
    /// Numerical tolerance for verdicts.
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol: f64,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Sampling size: w-grid points for `spectrum`, hyperplane samples for `analyze`.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Coefficients of det(I + Σ z_k A_k).
    Charpoly {
        /// Tuple document, `-` for standard input.
        input: PathBuf,
    },
    /// Commutativity, reducibility and hyperplane checks side by side.
    Analyze { input: PathBuf },
    /// Samples of the curve det(I + zA + wB) = 0 over real w in [-1, 1], as CSV.
    Spectrum { input: PathBuf },
    /// Writes a seeded tuple document.
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long = "dim", default_value_t = 2)]
        dim: usize,
        #[arg(long = "arity", default_value_t = 2)]
        arity: usize,
    },
}

fn read_document(path: &PathBuf) -> Result<TupleDocument, CliError> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Io(e.to_string()))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
    };
    TupleDocument::parse(&text)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("PROJSPEC_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Input(format!("PROJSPEC_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Io(e.to_string()))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    configure_threads()?;
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(CliError::Input(format!("--tol must be positive, got {}", cli.tol)));
    }
    let cfg = RunConfig {
        tol: cli.tol,
        seed: cli.seed,
        grid: cli.grid,
        format: cli.format,
    };
    let output = match &cli.command {
        Command::Charpoly { input } => commands::cmd_charpoly(&read_document(input)?, &cfg)?,
        Command::Analyze { input } => commands::cmd_analyze(&read_document(input)?, &cfg)?,
        Command::Spectrum { input } => commands::cmd_spectrum(&read_document(input)?, &cfg)?,
        Command::Generate { kind, dim, arity } => commands::cmd_generate(*kind, *dim, *arity, &cfg)?,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, &output.text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => std::io::stdout()
            .lock()
            .write_all(output.text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string()))?,
    }
    Ok(output.flagged)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            error!("{e}");
            eprintln!("projspec: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
