//! Randomized bound-verification campaign with per-bound slack aggregation
//! and one-command replay of any offending instance.

use crate::instances::{random_instance, MeasurementChoice};
use crate::{emit, fail, CommonArgs, Format, RunError};
use kdq_core::kd::{
    bipartition, bound_suite, entrywise_bounds_check, nonclassicality_witness,
    sum_sq_bound_check, support_uncertainty_check, BoundCheck, BoundReport, BoundStatus,
    KdInstance,
};
use kdq_core::quantum::SeededRng;
use kdq_core::tolerances::Tolerances;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

/// Exponents for the power-sum bounds checked alongside the fixed catalogue.
const ALPHAS: [f64; 3] = [2.0, 3.0, 4.5];

#[derive(clap::Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Measurement ensemble drawn for each instance.
    #[arg(long, value_enum, default_value_t = MeasurementChoice::Mixed)]
    pub measurements: MeasurementChoice,
    /// Measurements per instance (2 to 8); omitted means mixing 2, 3, and 4.
    #[arg(long)]
    pub n_measurements: Option<usize>,
    /// Re-analyze a serialized instance instead of running a campaign.
    #[arg(long)]
    pub replay: Option<PathBuf>,
}

#[derive(Serialize)]
struct BoundAgg {
    instances: usize,
    satisfied: usize,
    violated: usize,
    not_applicable: usize,
    min_slack: f64,
    worst_instance: usize,
}

#[derive(Serialize)]
struct Violation {
    instance_index: usize,
    bounds: Vec<BoundCheck>,
    instance: KdInstance,
}

#[derive(Serialize)]
struct VerifyReport {
    command: &'static str,
    seed: u64,
    dim: usize,
    count: usize,
    measurements: &'static str,
    n_measurements: String,
    tolerance: f64,
    all_passing: bool,
    bounds: BTreeMap<String, BoundAgg>,
    violations: Vec<Violation>,
}

#[derive(Serialize)]
struct ReplayReport {
    command: &'static str,
    replay: String,
    all_passing: bool,
    report: BoundReport,
}

struct Outcome {
    index: usize,
    bounds: Vec<BoundCheck>,
    violation: Option<KdInstance>,
}

/// Full analysis of one instance: the two-measurement catalogue when n = 2,
/// otherwise the squared-sum bound plus flattening validation.
fn analyze(instance: &KdInstance, tol: &Tolerances) -> Result<BoundReport, RunError> {
    let q = instance.distribution().map_err(fail)?;
    if instance.measurements.len() == 2 {
        // Any disagreement between the two witness tests is table corruption.
        nonclassicality_witness(&q).map_err(fail)?;
        let x = &instance.measurements[0];
        let y = &instance.measurements[1];
        Ok(bound_suite(&instance.state, x, y, &ALPHAS, tol)
            .map_err(fail)?
            .merge(entrywise_bounds_check(&q, tol).map_err(fail)?)
            .merge(
                support_uncertainty_check(&instance.state, x, y, tol.support_threshold, tol)
                    .map_err(fail)?,
            ))
    } else {
        for split in 1..instance.measurements.len() {
            bipartition(&q, split).map_err(fail)?;
        }
        Ok(sum_sq_bound_check(&q, tol))
    }
}

pub fn run(args: VerifyArgs) -> Result<ExitCode, RunError> {
    args.common.validate()?;
    if let Some(n) = args.n_measurements {
        if !(2..=8).contains(&n) {
            return Err(RunError::Config(format!(
                "--n-measurements must be between 2 and 8, got {n}"
            )));
        }
    }
    let tol = args.common.tolerances();
    if let Some(path) = &args.replay {
        return replay(&args, path, &tol);
    }

    let seed = args.common.seed;
    let dim = args.common.dim;
    let master = SeededRng::new(seed);
    let outcomes: Vec<Outcome> = (0..args.common.count as u64)
        .into_par_iter()
        .map(|i| -> Result<Outcome, RunError> {
            let mut rng = master.derive(i);
            let n = match args.n_measurements {
                Some(n) => n,
                None => [2, 3, 4][rng.index(3)],
            };
            let instance = random_instance(dim, n, args.measurements, &mut rng).map_err(fail)?;
            let report = analyze(&instance, &tol)?;
            let bounds = report.bounds.clone();
            let violation = (!report.all_passing()).then_some(instance);
            Ok(Outcome {
                index: i as usize,
                bounds,
                violation,
            })
        })
        .collect::<Result<_, _>>()?;

    let mut aggregates: BTreeMap<String, BoundAgg> = BTreeMap::new();
    let mut violations: Vec<Violation> = Vec::new();
    for outcome in outcomes {
        for check in &outcome.bounds {
            let agg = aggregates
                .entry(check.id.clone())
                .or_insert_with(|| BoundAgg {
                    instances: 0,
                    satisfied: 0,
                    violated: 0,
                    not_applicable: 0,
                    min_slack: f64::INFINITY,
                    worst_instance: 0,
                });
            agg.instances += 1;
            match check.status {
                BoundStatus::Satisfied => agg.satisfied += 1,
                BoundStatus::Violated => agg.violated += 1,
                BoundStatus::NotApplicable => agg.not_applicable += 1,
            }
            if check.status != BoundStatus::NotApplicable && check.slack < agg.min_slack {
                agg.min_slack = check.slack;
                agg.worst_instance = outcome.index;
            }
        }
        if let Some(instance) = outcome.violation {
            let bounds = outcome.bounds.iter().filter(|c| c.violated()).cloned().collect();
            violations.push(Violation {
                instance_index: outcome.index,
                bounds,
                instance,
            });
        }
    }

    let all_passing = violations.is_empty();
    if let Some(worst) = violations.first() {
        let replay_path = match &args.common.out {
            Some(p) => p.with_extension("violation.json"),
            None => PathBuf::from(format!("kdq-violation-seed{seed}.json")),
        };
        let text = serde_json::to_string_pretty(&worst.instance).map_err(fail)?;
        std::fs::write(&replay_path, text).map_err(fail)?;
        eprintln!(
            "bound violation at instance {}; offender written to {} (rerun with --replay)",
            worst.instance_index,
            replay_path.display()
        );
    }

    let body = match args.common.format {
        Format::Json => {
            let report = VerifyReport {
                command: "verify",
                seed,
                dim,
                count: args.common.count,
                measurements: args.measurements.label(),
                n_measurements: args
                    .n_measurements
                    .map(|n| n.to_string())
                    .unwrap_or_else(|| "mixed".into()),
                tolerance: args.common.tol,
                all_passing,
                bounds: aggregates,
                violations,
            };
            serde_json::to_string_pretty(&report).map_err(fail)?
        }
        Format::Csv => {
            let mut text =
                String::from("id,instances,satisfied,violated,not_applicable,min_slack,worst_instance\n");
            for (id, agg) in &aggregates {
                text.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    id,
                    agg.instances,
                    agg.satisfied,
                    agg.violated,
                    agg.not_applicable,
                    agg.min_slack,
                    agg.worst_instance
                ));
            }
            text
        }
    };
    emit(&args.common, Some(seed), &body)?;
    Ok(if all_passing {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn replay(args: &VerifyArgs, path: &PathBuf, tol: &Tolerances) -> Result<ExitCode, RunError> {
    let text = std::fs::read_to_string(path).map_err(fail)?;
    let instance: KdInstance = serde_json::from_str(&text).map_err(fail)?;
    let report = analyze(&instance, tol)?;
    let all_passing = report.all_passing();
    let body = match args.common.format {
        Format::Json => serde_json::to_string_pretty(&ReplayReport {
            command: "verify",
            replay: path.display().to_string(),
            all_passing,
            report,
        })
        .map_err(fail)?,
        Format::Csv => report.to_csv(),
    };
    emit(&args.common, None, &body)?;
    Ok(if all_passing {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
