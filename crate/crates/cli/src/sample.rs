//! Emits one row per random two-measurement instance for external plotting of
//! the classical / KD / postquantum boundary picture.

use crate::instances::{random_instance, MeasurementChoice};
use crate::{emit, fail, CommonArgs, Format, RunError};
use kdq_core::kd::{nonclassicality_witness, support_counts};
use kdq_core::quantum::{max_overlap, SeededRng};
use rayon::prelude::*;
use serde::Serialize;
use std::process::ExitCode;

/// Fixed 8-column schema; the CSV header below is the authoritative order.
const CSV_HEADER: &str = "purity,max_overlap,n_x,n_y,n_xy,l1,l2_sq,nonclassical";

#[derive(clap::Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Measurement ensemble drawn for each instance.
    #[arg(long, value_enum, default_value_t = MeasurementChoice::Mixed)]
    pub measurements: MeasurementChoice,
}

#[derive(Serialize)]
struct Row {
    purity: f64,
    max_overlap: f64,
    n_x: usize,
    n_y: usize,
    n_xy: usize,
    l1: f64,
    l2_sq: f64,
    nonclassical: bool,
}

#[derive(Serialize)]
struct SampleReport {
    command: &'static str,
    seed: u64,
    dim: usize,
    count: usize,
    measurements: &'static str,
    rows: Vec<Row>,
}

pub fn run(args: SampleArgs) -> Result<ExitCode, RunError> {
    args.common.validate()?;
    let tol = args.common.tolerances();
    let seed = args.common.seed;
    let master = SeededRng::new(seed);
    let rows: Vec<Row> = (0..args.common.count as u64)
        .into_par_iter()
        .map(|i| -> Result<Row, RunError> {
            let mut rng = master.derive(i);
            let instance =
                random_instance(args.common.dim, 2, args.measurements, &mut rng).map_err(fail)?;
            let q = instance.distribution().map_err(fail)?;
            let counts = support_counts(&q, tol.support_threshold).map_err(fail)?;
            let witness = nonclassicality_witness(&q).map_err(fail)?;
            Ok(Row {
                purity: instance.state.purity(),
                max_overlap: max_overlap(&instance.measurements[0], &instance.measurements[1]),
                n_x: counts.n_x,
                n_y: counts.n_y,
                n_xy: counts.n_xy,
                l1: q.l1_norm(),
                l2_sq: q.l2_norm_sq(),
                nonclassical: witness.nonclassical,
            })
        })
        .collect::<Result<_, _>>()?;

    let body = match args.common.format {
        Format::Json => serde_json::to_string_pretty(&SampleReport {
            command: "sample",
            seed,
            dim: args.common.dim,
            count: args.common.count,
            measurements: args.measurements.label(),
            rows,
        })
        .map_err(fail)?,
        Format::Csv => {
            let mut text = String::from(CSV_HEADER);
            text.push('\n');
            for r in &rows {
                text.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.purity, r.max_overlap, r.n_x, r.n_y, r.n_xy, r.l1, r.l2_sq, r.nonclassical
                ));
            }
            text
        }
    };
    emit(&args.common, Some(seed), &body)?;
    Ok(ExitCode::SUCCESS)
}
