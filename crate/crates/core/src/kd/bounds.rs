//! Inequality catalogue for quasiprobability tables.
//!
//! Every check records both sides and the slack rhs - lhs; a bound passes when
//! the slack clears the shared tolerance. Checks whose precondition fails are
//! reported as not-applicable instead of being dropped, and no result is ever
//! inferred from another check.

use super::{kd_distribution, marginals, support_counts, KdDistribution, KdError, SupportCounts};
use crate::quantum::{max_overlap, DensityMatrix, Povm};
use crate::tolerances::Tolerances;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

pub const ENTRY_SQ_LE_MARGINAL_PRODUCT: &str = "entry_sq_le_marginal_product";
pub const ENTRY_ABS_LE_MAX_MARGINAL: &str = "entry_abs_le_max_marginal";
pub const SUM_SQ_LE_ONE: &str = "sum_sq_le_one";
pub const SUM_SQ_LE_OVERLAP_TIMES_PURITY: &str = "sum_sq_le_overlap_times_purity";
pub const SUM_SQ_LE_MAX_OVERLAP: &str = "sum_sq_le_max_overlap";
pub const SUM_SQ_LE_PURITY: &str = "sum_sq_le_purity";
pub const L1_LE_SQRT_OUTCOMES: &str = "l1_le_sqrt_outcomes";
pub const L1_LE_SQRT_JOINT_SUPPORT: &str = "l1_le_sqrt_joint_support";
pub const JOINT_SUPPORT_LE_MARGINAL_SUPPORT: &str = "joint_support_le_marginal_support";
pub const L1_LE_SQRT_SUPPORT_PURITY_OVERLAP: &str = "l1_le_sqrt_support_purity_overlap";
pub const SUPPORT_PRODUCT_GE_INV_PURITY_OVERLAP: &str = "support_product_ge_inv_purity_overlap";

/// Identifier for the power-sum comparison at a given exponent.
pub fn alpha_norm_id(alpha: f64) -> String {
    format!("alpha_norm_le_sum_sq[alpha={alpha}]")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    Satisfied,
    Violated,
    NotApplicable,
}

impl BoundStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundStatus::Satisfied => "satisfied",
            BoundStatus::Violated => "violated",
            BoundStatus::NotApplicable => "not_applicable",
        }
    }
}

/// One evaluated inequality lhs <= rhs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub status: BoundStatus,
}

impl BoundCheck {
    /// Evaluates lhs <= rhs, passing when the slack clears -slack tolerance.
    pub fn checked(id: impl Into<String>, lhs: f64, rhs: f64, tol: &Tolerances) -> Self {
        debug_assert!(lhs.is_finite() && rhs.is_finite());
        let slack = rhs - lhs;
        let status = if slack >= -tol.slack {
            BoundStatus::Satisfied
        } else {
            BoundStatus::Violated
        };
        BoundCheck {
            id: id.into(),
            lhs,
            rhs,
            slack,
            status,
        }
    }

    /// Records both sides of a bound whose precondition failed.
    pub fn not_applicable(id: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        BoundCheck {
            id: id.into(),
            lhs,
            rhs,
            slack: rhs - lhs,
            status: BoundStatus::NotApplicable,
        }
    }

    pub fn satisfied(&self) -> bool {
        self.status == BoundStatus::Satisfied
    }

    pub fn violated(&self) -> bool {
        self.status == BoundStatus::Violated
    }
}

/// Context shared by every check in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub outcome_count: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub supports: Option<SupportCounts>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub purity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_overlap: Option<f64>,
}

/// A batch of bound checks over one distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub metadata: ReportMetadata,
    pub bounds: Vec<BoundCheck>,
}

impl BoundReport {
    /// True when no check is violated (not-applicable checks do not fail).
    pub fn all_passing(&self) -> bool {
        self.bounds.iter().all(|b| !b.violated())
    }

    pub fn find(&self, id: &str) -> Option<&BoundCheck> {
        self.bounds.iter().find(|b| b.id == id)
    }

    /// Applicable check with the smallest slack.
    pub fn worst(&self) -> Option<&BoundCheck> {
        self.bounds
            .iter()
            .filter(|b| b.status != BoundStatus::NotApplicable)
            .min_by(|a, b| a.slack.total_cmp(&b.slack))
    }

    /// Appends another report's checks, keeping this report's metadata.
    pub fn merge(mut self, other: BoundReport) -> BoundReport {
        self.bounds.extend(other.bounds);
        self
    }

    /// One row per check: id,lhs,rhs,slack,status.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,lhs,rhs,slack,status\n");
        for b in &self.bounds {
            writeln!(
                out,
                "{},{},{},{},{}",
                b.id,
                b.lhs,
                b.rhs,
                b.slack,
                b.status.as_str()
            )
            .expect("string write cannot fail");
        }
        out
    }
}

/// Per-entry bounds |q|^2 <= p_x p_y and |q| <= max(p_x, p_y); each check
/// reports its worst entry.
pub fn entrywise_bounds_check(
    q: &KdDistribution,
    tol: &Tolerances,
) -> Result<BoundReport, KdError> {
    if q.n_measurements() != 2 {
        return Err(KdError::NotTwoMeasurements {
            n: q.n_measurements(),
        });
    }
    let m = marginals(q);
    let (nx, ny) = (q.dims()[0], q.dims()[1]);
    let mut worst_sq = (f64::INFINITY, 0.0, 0.0);
    let mut worst_abs = (f64::INFINITY, 0.0, 0.0);
    for x in 0..nx {
        for y in 0..ny {
            let modulus = q.at(x, y).norm();
            let (px, py) = (m.measurement(0)[x], m.measurement(1)[y]);
            let (lhs_sq, rhs_sq) = (modulus * modulus, px * py);
            if rhs_sq - lhs_sq < worst_sq.0 {
                worst_sq = (rhs_sq - lhs_sq, lhs_sq, rhs_sq);
            }
            let (lhs_abs, rhs_abs) = (modulus, px.max(py));
            if rhs_abs - lhs_abs < worst_abs.0 {
                worst_abs = (rhs_abs - lhs_abs, lhs_abs, rhs_abs);
            }
        }
    }
    Ok(BoundReport {
        metadata: ReportMetadata {
            outcome_count: q.outcome_count(),
            supports: Some(support_counts(q, tol.support_threshold)?),
            purity: None,
            max_overlap: None,
        },
        bounds: vec![
            BoundCheck::checked(ENTRY_SQ_LE_MARGINAL_PRODUCT, worst_sq.1, worst_sq.2, tol),
            BoundCheck::checked(ENTRY_ABS_LE_MAX_MARGINAL, worst_abs.1, worst_abs.2, tol),
        ],
    })
}

/// Full two-measurement suite: squared-sum bounds, the power-sum chain at the
/// given exponents (all >= 2), overlap/purity-dependent bounds, and the
/// support-based l1 bounds. The purity comparison only applies when the
/// largest element overlap stays within 1; two trivial measurements exceed it
/// and the check is reported not-applicable.
pub fn bound_suite(
    rho: &DensityMatrix,
    x: &Povm,
    y: &Povm,
    alphas: &[f64],
    tol: &Tolerances,
) -> Result<BoundReport, KdError> {
    for &alpha in alphas {
        if alpha.is_nan() || alpha < 2.0 {
            return Err(KdError::AlphaOutOfRange { alpha, min: 2.0 });
        }
    }
    let q = kd_distribution(rho, x, y)?;
    let l1 = q.l1_norm();
    let l2_sq = q.l2_norm_sq();
    let purity = rho.purity();
    let overlap = max_overlap(x, y);
    let counts = support_counts(&q, tol.support_threshold)?;
    let marginal_support = (counts.n_x * counts.n_y) as f64;

    let mut bounds = vec![BoundCheck::checked(SUM_SQ_LE_ONE, l2_sq, 1.0, tol)];
    for &alpha in alphas {
        bounds.push(BoundCheck::checked(
            alpha_norm_id(alpha),
            q.power_sum(alpha),
            l2_sq,
            tol,
        ));
    }
    bounds.push(BoundCheck::checked(
        SUM_SQ_LE_OVERLAP_TIMES_PURITY,
        l2_sq,
        overlap * purity,
        tol,
    ));
    bounds.push(BoundCheck::checked(
        SUM_SQ_LE_MAX_OVERLAP,
        l2_sq,
        overlap,
        tol,
    ));
    if overlap <= 1.0 + tol.slack {
        bounds.push(BoundCheck::checked(SUM_SQ_LE_PURITY, l2_sq, purity, tol));
    } else {
        bounds.push(BoundCheck::not_applicable(SUM_SQ_LE_PURITY, l2_sq, purity));
    }
    bounds.push(BoundCheck::checked(
        L1_LE_SQRT_OUTCOMES,
        l1,
        (q.outcome_count() as f64).sqrt(),
        tol,
    ));
    bounds.push(BoundCheck::checked(
        L1_LE_SQRT_JOINT_SUPPORT,
        l1,
        (counts.n_xy as f64).sqrt(),
        tol,
    ));
    bounds.push(BoundCheck::checked(
        JOINT_SUPPORT_LE_MARGINAL_SUPPORT,
        counts.n_xy as f64,
        marginal_support,
        tol,
    ));
    bounds.push(BoundCheck::checked(
        L1_LE_SQRT_SUPPORT_PURITY_OVERLAP,
        l1,
        (marginal_support * purity * overlap).sqrt(),
        tol,
    ));
    Ok(BoundReport {
        metadata: ReportMetadata {
            outcome_count: q.outcome_count(),
            supports: Some(counts),
            purity: Some(purity),
            max_overlap: Some(overlap),
        },
        bounds,
    })
}

/// Squared-sum and sqrt-count bounds that hold for any number of
/// measurements.
pub fn sum_sq_bound_check(q: &KdDistribution, tol: &Tolerances) -> BoundReport {
    BoundReport {
        metadata: ReportMetadata {
            outcome_count: q.outcome_count(),
            supports: None,
            purity: None,
            max_overlap: None,
        },
        bounds: vec![
            BoundCheck::checked(SUM_SQ_LE_ONE, q.l2_norm_sq(), 1.0, tol),
            BoundCheck::checked(
                L1_LE_SQRT_OUTCOMES,
                q.l1_norm(),
                (q.outcome_count() as f64).sqrt(),
                tol,
            ),
        ],
    }
}

/// Lower bound on the marginal support product from purity and overlap,
/// recorded with the product on the rhs so slack keeps its meaning.
pub fn support_uncertainty_check(
    rho: &DensityMatrix,
    x: &Povm,
    y: &Povm,
    threshold: f64,
    tol: &Tolerances,
) -> Result<BoundReport, KdError> {
    let q = kd_distribution(rho, x, y)?;
    let counts = support_counts(&q, threshold)?;
    let purity = rho.purity();
    let overlap = max_overlap(x, y);
    let lhs = 1.0_f64.max(1.0 / (purity * overlap));
    let rhs = (counts.n_x * counts.n_y) as f64;
    Ok(BoundReport {
        metadata: ReportMetadata {
            outcome_count: q.outcome_count(),
            supports: Some(counts),
            purity: Some(purity),
            max_overlap: Some(overlap),
        },
        bounds: vec![BoundCheck::checked(
            SUPPORT_PRODUCT_GE_INV_PURITY_OVERLAP,
            lhs,
            rhs,
            tol,
        )],
    })
}
