//! `kdq`: compute Kirkwood-Dirac quasiprobability tables, verify the bound
//! catalogue over random ensembles, and search for extremal distributions.
//!
//! Exit status: 0 = all checks pass, 1 = a bound or expectation was violated
//! (or a runtime failure), 2 = usage or configuration error.

mod demo;
mod instances;
mod optimize;
mod realsup;
mod sample;
mod verify;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kdq_core::tolerances::Tolerances;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "kdq",
    version,
    about = "Kirkwood-Dirac quasiprobability tables: compute, verify, search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recompute the built-in closed-form examples and check every frozen value.
    Demo(demo::DemoArgs),
    /// Run a randomized bound-verification campaign, aggregating slack per bound.
    Verify(verify::VerifyArgs),
    /// Emit per-instance rows (purity, overlap, supports, norms, witness flag).
    Sample(sample::SampleArgs),
    /// Maximize the l1 or squared l2 norm over states and projective bases.
    Optimize(optimize::OptimizeArgs),
    /// Grid-search the real-table l1 supremum and cross-check the case formulas.
    RealSup(realsup::RealSupArgs),
}

/// Flags shared by every subcommand.
#[derive(Args, Clone)]
pub struct CommonArgs {
    /// Hilbert-space dimension, between 2 and 32.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Master seed; every random draw derives from it.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Instance count (optimize reads this as the restart count).
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    /// Slack tolerance for bound checks.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Write the report to this path instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl CommonArgs {
    fn validate(&self) -> Result<(), RunError> {
        if !(2..=32).contains(&self.dim) {
            return Err(RunError::Config(format!(
                "--dim must be between 2 and 32, got {}",
                self.dim
            )));
        }
        if self.count == 0 {
            return Err(RunError::Config("--count must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(RunError::Config(format!(
                "--tol must be a positive finite number, got {}",
                self.tol
            )));
        }
        Ok(())
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances::with_slack(self.tol)
    }
}

/// Configuration problems exit 2; everything else that goes wrong exits 1.
pub enum RunError {
    Config(String),
    Failure(String),
}

/// Wraps any displayable error as a runtime failure.
pub fn fail(err: impl std::fmt::Display) -> RunError {
    RunError::Failure(err.to_string())
}

/// Prints a line to stdout, treating a closed pipe as a normal end of output.
fn print_line(text: &str) -> Result<(), RunError> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}") {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(fail(e)),
    }
}

/// Writes the report body to `--out` (announcing the seed and path on stdout)
/// or prints it directly. `seed` is given by commands whose output is
/// replayable from it.
pub fn emit(common: &CommonArgs, seed: Option<u64>, body: &str) -> Result<(), RunError> {
    match &common.out {
        Some(path) => {
            std::fs::write(path, body).map_err(fail)?;
            if let Some(seed) = seed {
                print_line(&format!("seed: {seed}"))?;
            }
            print_line(&format!("report written to {}", path.display()))?;
        }
        None => {
            // Keep stdout machine-readable; the replay seed goes to stderr.
            if common.format == Format::Csv {
                if let Some(seed) = seed {
                    eprintln!("seed: {seed}");
                }
            }
            print_line(body.strip_suffix('\n').unwrap_or(body))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Demo(args) => demo::run(args),
        Command::Verify(args) => verify::run(args),
        Command::Sample(args) => sample::run(args),
        Command::Optimize(args) => optimize::run(args),
        Command::RealSup(args) => realsup::run(args),
    };
    match result {
        Ok(code) => code,
        Err(RunError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
