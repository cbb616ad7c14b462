//! Drives the derivative-free search for extremal distributions and writes
//! the full result, including the best instance and improvement trace.

use crate::{emit, fail, CommonArgs, Format, RunError};
use kdq_core::quantum::SeededRng;
use kdq_core::search::{maximize_l1, maximize_l2, SearchResult};
use serde::Serialize;
use std::process::ExitCode;

#[derive(clap::Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Objective to maximize over pure states and projective bases.
    #[arg(long, value_enum, default_value_t = ObjectiveChoice::L1)]
    pub objective: ObjectiveChoice,
    /// Pattern-search passes per restart.
    #[arg(long, default_value_t = 60)]
    pub iters: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ObjectiveChoice {
    L1,
    L2,
}

#[derive(Serialize)]
struct OptimizeReport {
    command: &'static str,
    seed: u64,
    dim: usize,
    objective: &'static str,
    restarts: usize,
    iters: usize,
    cap: f64,
    within_cap: bool,
    result: SearchResult,
}

pub fn run(args: OptimizeArgs) -> Result<ExitCode, RunError> {
    args.common.validate()?;
    if args.iters == 0 {
        return Err(RunError::Config("--iters must be at least 1".into()));
    }
    let seed = args.common.seed;
    let dim = args.common.dim;
    let restarts = args.common.count;
    let rng = SeededRng::new(seed);
    let (name, cap, result) = match args.objective {
        ObjectiveChoice::L1 => {
            // Two rank-one bases give dim^2 outcomes, capping l1 at dim.
            let result = maximize_l1(dim, &rng, restarts, args.iters).map_err(fail)?;
            ("l1", dim as f64, result)
        }
        ObjectiveChoice::L2 => {
            let result = maximize_l2(dim, &rng, restarts, args.iters).map_err(fail)?;
            ("l2_sq", 1.0, result)
        }
    };
    let within_cap = result.best_value <= cap + args.common.tol;

    let body = match args.common.format {
        Format::Json => serde_json::to_string_pretty(&OptimizeReport {
            command: "optimize",
            seed,
            dim,
            objective: name,
            restarts,
            iters: args.iters,
            cap,
            within_cap,
            result,
        })
        .map_err(fail)?,
        Format::Csv => {
            let mut text = String::from("evaluation,value\n");
            for (evaluation, value) in &result.trace {
                text.push_str(&format!("{evaluation},{value}\n"));
            }
            text
        }
    };
    emit(&args.common, Some(seed), &body)?;
    Ok(if within_cap {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
