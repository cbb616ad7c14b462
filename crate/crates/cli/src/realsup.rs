//! Grid search for the supremum of the l1 norm over real 2x2 tables, plus the
//! analytic negative-count case formulas it validates against.

use crate::{emit, fail, CommonArgs, Format, RunError};
use kdq_core::postquantum::{
    make_real_quasi, negative_case_check, real_negative_example, real_sup_search_detailed,
    saturating_family_one_negative, saturating_family_two_negative, CaseCheck,
    RealQuasiDistribution,
};
use serde::Serialize;
use std::process::ExitCode;

#[derive(clap::Args)]
pub struct RealSupArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Grid spacing for the three free entries, between 0.005 and 0.5.
    #[arg(long, default_value_t = 0.05)]
    pub grid_step: f64,
    /// Local refinement passes after the grid scan.
    #[arg(long, default_value_t = 3)]
    pub refine_iters: usize,
}

#[derive(Serialize)]
struct RealSupCliReport {
    command: &'static str,
    grid_step: f64,
    refine_iters: usize,
    sup_found: f64,
    argmax: RealQuasiDistribution,
    case_maxima: [Option<f64>; 4],
    family_max_deviation: f64,
    case_checks: Vec<CaseCheck>,
    boundary_case3_l1: f64,
    pass: bool,
}

pub fn run(args: RealSupArgs) -> Result<ExitCode, RunError> {
    args.common.validate()?;
    if !(args.grid_step.is_finite() && (0.005..=0.5).contains(&args.grid_step)) {
        return Err(RunError::Config(format!(
            "--grid-step must be between 0.005 and 0.5, got {}",
            args.grid_step
        )));
    }
    let detail = real_sup_search_detailed(args.grid_step, args.refine_iters);

    // Both saturating families must sit exactly on 3.
    let mut family_max_deviation: f64 = 0.0;
    for i in 0..=10u32 {
        for j in 0..=10u32 {
            if i + j < 10 {
                continue;
            }
            let q = saturating_family_one_negative(i as f64 / 10.0, j as f64 / 10.0)
                .map_err(fail)?;
            family_max_deviation = family_max_deviation.max((q.l1_norm() - 3.0).abs());
        }
    }
    for i in 0..=20u32 {
        let q = saturating_family_two_negative(-1.0 + i as f64 / 20.0).map_err(fail)?;
        family_max_deviation = family_max_deviation.max((q.l1_norm() - 3.0).abs());
    }

    // One representative per negative count; the check itself errors if a
    // closed form drifts from the direct sum.
    let samples = [
        saturating_family_one_negative(0.3, 0.9).map_err(fail)?,
        real_negative_example(),
        saturating_family_two_negative(-0.25).map_err(fail)?,
    ];
    let mut case_checks = Vec::new();
    for q in &samples {
        case_checks.push(negative_case_check(q).map_err(fail)?);
    }
    // Three strict negatives only exist against the unit-sum tolerance; the
    // exhibit shows the resulting l1 stays at 1, far below 3.
    let eps = 1e-10;
    let boundary = make_real_quasi(2, 2, vec![-eps, -eps, -eps, 1.0 + 3.0 * eps]).map_err(fail)?;
    case_checks.push(negative_case_check(&boundary).map_err(fail)?);
    let boundary_case3_l1 = boundary.l1_norm();

    let pass = detail.sup_found <= 3.0 + args.common.tol
        && family_max_deviation <= 1e-12
        && boundary_case3_l1 <= 1.0 + 1e-9;

    let body = match args.common.format {
        Format::Json => serde_json::to_string_pretty(&RealSupCliReport {
            command: "real-sup",
            grid_step: args.grid_step,
            refine_iters: args.refine_iters,
            sup_found: detail.sup_found,
            argmax: detail.argmax,
            case_maxima: detail.case_maxima,
            family_max_deviation,
            case_checks,
            boundary_case3_l1,
            pass,
        })
        .map_err(fail)?,
        Format::Csv => {
            let mut text = String::from("quantity,value\n");
            text.push_str(&format!("sup_found,{}\n", detail.sup_found));
            for (k, m) in detail.case_maxima.iter().enumerate() {
                match m {
                    Some(v) => text.push_str(&format!("case_maximum_{k},{v}\n")),
                    None => text.push_str(&format!("case_maximum_{k},none\n")),
                }
            }
            text.push_str(&format!("family_max_deviation,{family_max_deviation}\n"));
            text.push_str(&format!("boundary_case3_l1,{boundary_case3_l1}\n"));
            text.push_str(&format!("pass,{pass}\n"));
            text
        }
    };
    emit(&args.common, None, &body)?;
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
