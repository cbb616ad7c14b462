//! Recomputes the built-in closed-form examples and compares every value
//! against its frozen analytic expression.

use crate::{emit, fail, CommonArgs, Format, RunError};
use kdq_core::kd::{
    bound_suite, entrywise_bounds_check, kd_distribution, marginals, nonclassicality_witness,
    support_uncertainty_check, BoundReport,
};
use kdq_core::postquantum::{
    complex_saturator_example, negative_case_check, real_negative_example,
    saturating_family_one_negative, saturating_family_two_negative,
};
use kdq_core::quantum::nonclassical_qubit_example;
use serde::Serialize;
use std::process::ExitCode;

#[derive(clap::Args)]
pub struct DemoArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    got: f64,
    want: f64,
    ok: bool,
}

#[derive(Serialize)]
struct DemoReport {
    command: &'static str,
    tolerance: f64,
    all_ok: bool,
    headline: Vec<String>,
    checks: Vec<Check>,
    bound_report: BoundReport,
}

pub fn run(args: DemoArgs) -> Result<ExitCode, RunError> {
    args.common.validate()?;
    let tol = args.common.tol;
    let tols = args.common.tolerances();
    let mut checks: Vec<Check> = Vec::new();
    let mut push = |name: &'static str, got: f64, want: f64| {
        checks.push(Check {
            name,
            got,
            want,
            ok: (got - want).abs() <= tol,
        });
    };

    let s3 = 3.0_f64.sqrt();
    let (rho, x, y) = nonclassical_qubit_example();
    let q = kd_distribution(&rho, &x, &y).map_err(fail)?;
    let wanted = [
        ("table[0][0]", (3.0 + s3) / 8.0),
        ("table[0][1]", (1.0 - s3) / 8.0),
        ("table[1][0]", (3.0 - s3) / 8.0),
        ("table[1][1]", (1.0 + s3) / 8.0),
    ];
    for ((name, want), z) in wanted.into_iter().zip(q.table()) {
        push(name, z.re, want);
    }
    let max_im = q.table().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    push("table.max_imaginary", max_im, 0.0);

    let m = marginals(&q);
    push("marginal_x[0]", m.measurement(0)[0], 0.5);
    push("marginal_x[1]", m.measurement(0)[1], 0.5);
    push("marginal_y[0]", m.measurement(1)[0], 0.75);
    push("marginal_y[1]", m.measurement(1)[1], 0.25);
    push("l1_norm", q.l1_norm(), (3.0 + s3) / 4.0);
    push("sum_sq", q.l2_norm_sq(), 0.5);

    let witness = nonclassicality_witness(&q).map_err(fail)?;
    push(
        "witness.nonclassical",
        f64::from(witness.nonclassical),
        1.0,
    );
    push("witness.excess", witness.excess, (3.0 + s3) / 4.0 - 1.0);

    let bound_report = bound_suite(&rho, &x, &y, &[2.0, 3.0], &tols)
        .map_err(fail)?
        .merge(entrywise_bounds_check(&q, &tols).map_err(fail)?)
        .merge(support_uncertainty_check(&rho, &x, &y, tols.support_threshold, &tols).map_err(fail)?);
    push(
        "bounds.all_passing",
        f64::from(bound_report.all_passing()),
        1.0,
    );

    let saturator = complex_saturator_example();
    push("saturator.l1", saturator.l1_norm(), 4.0);
    push("saturator.power_sum_2", saturator.power_sum(2.0), 4.0);
    push("saturator.power_sum_3", saturator.power_sum(3.0), 4.0);

    let real = real_negative_example();
    push("real_example.l1", real.l1_norm(), 3.0);
    let real_case = negative_case_check(&real).map_err(fail)?;
    push("real_example.negatives", real_case.negatives as f64, 2.0);
    push("real_example.case_formula", real_case.formula_value, 3.0);

    let fam1 = saturating_family_one_negative(0.5, 0.5).map_err(fail)?;
    push("family_one_negative.l1", fam1.l1_norm(), 3.0);
    let fam1_case = negative_case_check(&fam1).map_err(fail)?;
    push("family_one_negative.negatives", fam1_case.negatives as f64, 1.0);

    let fam2 = saturating_family_two_negative(-0.5).map_err(fail)?;
    push("family_two_negative.l1", fam2.l1_norm(), 3.0);
    let fam2_case = negative_case_check(&fam2).map_err(fail)?;
    push("family_two_negative.negatives", fam2_case.negatives as f64, 2.0);

    let all_ok = checks.iter().all(|c| c.ok);
    let headline = q
        .table()
        .iter()
        .enumerate()
        .map(|(k, z)| format!("q[{}][{}] = {:.6}{:+.6}i", k / 2, k % 2, z.re, z.im))
        .chain([
            format!("l1 = {:.6}", q.l1_norm()),
            format!("sum_sq = {:.6}", q.l2_norm_sq()),
            format!("saturator l1 = {:.6}", saturator.l1_norm()),
        ])
        .collect();

    let body = match args.common.format {
        Format::Json => {
            let report = DemoReport {
                command: "demo",
                tolerance: tol,
                all_ok,
                headline,
                checks,
                bound_report,
            };
            serde_json::to_string_pretty(&report).map_err(fail)?
        }
        Format::Csv => {
            let mut text = String::from("name,got,want,ok\n");
            for c in &checks {
                text.push_str(&format!("{},{},{},{}\n", c.name, c.got, c.want, c.ok));
            }
            text
        }
    };
    emit(&args.common, None, &body)?;
    Ok(if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
