//! Quasiprobability tables constrained only by unit sum and unit entry
//! modulus, dropping any requirement of a quantum realization.
//!
//! This is the widest of the three table classes the library compares:
//! probability tables sit inside quantum-realizable tables, which sit inside
//! these. The module reproduces the closed-form extremal tables, and a brute
//! grid search independently establishes that real 2x2 tables cannot push the
//! l1 norm past 3 even though the complex ones reach 4.

use crate::kd::bounds::{BoundCheck, BoundReport, ReportMetadata};
use crate::linalg::Complex64;
use crate::tolerances::Tolerances;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const L1_LE_OUTCOMES: &str = "l1_le_outcomes";

/// Identifier for the power-sum comparison against the outcome count.
pub fn abs_power_sum_id(alpha: f64) -> String {
    format!("abs_power_sum_le_outcomes[alpha={alpha}]")
}

/// Analytic formulas must match direct summation this tightly.
const CASE_FORMULA_TOL: f64 = 1e-12;

/// Headroom for the reconstructed fourth entry during the grid search.
const GRID_EDGE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum PostquantumError {
    #[error("table must be non-empty")]
    EmptyTable,
    #[error("entry count {actual} does not match {rows}x{cols}")]
    EntryCount {
        rows: usize,
        cols: usize,
        actual: usize,
    },
    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },
    #[error("table sum deviates from 1 by {deviation:.3e}")]
    UnitSumViolation { deviation: f64 },
    #[error("entry modulus {modulus} exceeds 1 beyond tolerance")]
    ModulusViolation { modulus: f64 },
    #[error("imaginary part {im:.3e} in a table declared real")]
    NotReal { im: f64 },
    #[error("unknown table kind {kind:?}")]
    UnknownKind { kind: String },
    #[error("table has no strictly negative entry")]
    NoNegativeEntry,
    #[error("case analysis needs a 2x2 table, got {rows}x{cols}")]
    NotTwoByTwo { rows: usize, cols: usize },
    #[error("case formula {formula_value} disagrees with direct sum {direct_value}")]
    CaseMismatch {
        formula_value: f64,
        direct_value: f64,
    },
    #[error("alpha {alpha} below minimum {min}")]
    AlphaOutOfRange { alpha: f64, min: f64 },
}

/// Two-index table with unit sum and every |l| <= 1; marginals may be complex
/// and are not required to be probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiDistribution {
    rows: usize,
    cols: usize,
    table: Vec<Complex64>,
}

/// Validates and wraps a flat row-major table.
pub fn make_quasi(
    rows: usize,
    cols: usize,
    table: Vec<Complex64>,
) -> Result<QuasiDistribution, PostquantumError> {
    let tol = Tolerances::standard();
    if rows == 0 || cols == 0 || table.is_empty() {
        return Err(PostquantumError::EmptyTable);
    }
    if table.len() != rows * cols {
        return Err(PostquantumError::EntryCount {
            rows,
            cols,
            actual: table.len(),
        });
    }
    if let Some(index) = table.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(PostquantumError::NonFinite { index });
    }
    let sum: Complex64 = table.iter().sum();
    let deviation = (sum - Complex64::ONE).norm();
    if deviation > tol.unit_sum {
        return Err(PostquantumError::UnitSumViolation { deviation });
    }
    let max_modulus = table.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max_modulus > 1.0 + tol.entry_modulus {
        return Err(PostquantumError::ModulusViolation {
            modulus: max_modulus,
        });
    }
    Ok(QuasiDistribution { rows, cols, table })
}

impl QuasiDistribution {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn outcome_count(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[Complex64] {
        &self.table
    }

    pub fn at(&self, x: usize, y: usize) -> Complex64 {
        assert!(x < self.rows && y < self.cols, "index out of range");
        self.table[x * self.cols + y]
    }

    pub fn sum(&self) -> Complex64 {
        self.table.iter().sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.table.iter().map(|z| z.norm()).sum()
    }

    pub fn power_sum(&self, alpha: f64) -> f64 {
        self.table.iter().map(|z| z.norm().powf(alpha)).sum()
    }

    pub fn max_modulus(&self) -> f64 {
        self.table.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Raw row and column sums; no probability validation by design.
pub fn quasi_marginals(q: &QuasiDistribution) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut rows = vec![Complex64::ZERO; q.rows()];
    let mut cols = vec![Complex64::ZERO; q.cols()];
    for x in 0..q.rows() {
        for y in 0..q.cols() {
            let z = q.at(x, y);
            rows[x] += z;
            cols[y] += z;
        }
    }
    (rows, cols)
}

/// Checks the l1 norm and the power sum at one exponent (alpha >= 0) against
/// the outcome count, the only bounds that survive without quantum structure.
pub fn l1_and_trivial_bound(
    q: &QuasiDistribution,
    alpha: f64,
    tol: &Tolerances,
) -> Result<BoundReport, PostquantumError> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(PostquantumError::AlphaOutOfRange { alpha, min: 0.0 });
    }
    let n = q.outcome_count() as f64;
    Ok(BoundReport {
        metadata: ReportMetadata {
            outcome_count: q.outcome_count(),
            supports: None,
            purity: None,
            max_overlap: None,
        },
        bounds: vec![
            BoundCheck::checked(L1_LE_OUTCOMES, q.l1_norm(), n, tol),
            BoundCheck::checked(abs_power_sum_id(alpha), q.power_sum(alpha), n, tol),
        ],
    })
}

/// Real-entry table; the negative-entry case analysis below applies to these.
#[derive(Debug, Clone, PartialEq)]
pub struct RealQuasiDistribution {
    rows: usize,
    cols: usize,
    table: Vec<f64>,
}

/// Validates and wraps a flat row-major real table.
pub fn make_real_quasi(
    rows: usize,
    cols: usize,
    table: Vec<f64>,
) -> Result<RealQuasiDistribution, PostquantumError> {
    let complex: Vec<Complex64> = table.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    make_quasi(rows, cols, complex)?;
    Ok(RealQuasiDistribution { rows, cols, table })
}

impl RealQuasiDistribution {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn at(&self, x: usize, y: usize) -> f64 {
        assert!(x < self.rows && y < self.cols, "index out of range");
        self.table[x * self.cols + y]
    }

    pub fn sum(&self) -> f64 {
        self.table.iter().sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.table.iter().map(|v| v.abs()).sum()
    }

    pub fn to_quasi(&self) -> QuasiDistribution {
        QuasiDistribution {
            rows: self.rows,
            cols: self.cols,
            table: self.table.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }
}

/// Real table (1, -1/2; -1/2, 1): l1 norm 3, both marginals (1/2, 1/2), and
/// an entry modulus exceeding both of its marginals.
pub fn real_negative_example() -> RealQuasiDistribution {
    make_real_quasi(2, 2, vec![1.0, -0.5, -0.5, 1.0]).expect("closed-form table is valid")
}

/// Complex table with every |l| = 1, so the l1 norm hits the outcome count 4.
pub fn complex_saturator_example() -> QuasiDistribution {
    let h = 3.0_f64.sqrt() / 2.0;
    make_quasi(
        2,
        2,
        vec![
            Complex64::new(0.5, h),
            Complex64::new(0.5, -h),
            Complex64::new(0.5, -h),
            Complex64::new(-0.5, h),
        ],
    )
    .expect("closed-form table is valid")
}

/// Family (-1, x, y, 2-x-y); l1 norm is exactly 3 whenever x, y are in [0, 1]
/// with x + y >= 1.
pub fn saturating_family_one_negative(
    x: f64,
    y: f64,
) -> Result<RealQuasiDistribution, PostquantumError> {
    make_real_quasi(2, 2, vec![-1.0, x, y, 2.0 - x - y])
}

/// Family (x, -x-1, 1, 1); l1 norm is exactly 3 for x in [-1, 0].
pub fn saturating_family_two_negative(x: f64) -> Result<RealQuasiDistribution, PostquantumError> {
    make_real_quasi(2, 2, vec![x, -x - 1.0, 1.0, 1.0])
}

/// Outcome of the negative-entry case analysis of a real 2x2 table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseCheck {
    /// Number of strictly negative entries (1, 2, or 3).
    pub negatives: usize,
    /// The case's closed-form l1 value.
    pub formula_value: f64,
    /// Direct summation of |l| over the table.
    pub direct_value: f64,
}

/// Classifies a real 2x2 table by its count of strictly negative entries and
/// cross-checks the per-case closed form for the l1 norm against direct
/// summation. Unit sum caps the count at three: four negative entries cannot
/// sum to 1.
pub fn negative_case_check(q: &RealQuasiDistribution) -> Result<CaseCheck, PostquantumError> {
    if q.rows() != 2 || q.cols() != 2 {
        return Err(PostquantumError::NotTwoByTwo {
            rows: q.rows(),
            cols: q.cols(),
        });
    }
    let negatives: Vec<f64> = q.table().iter().copied().filter(|&v| v < 0.0).collect();
    let nonnegatives: Vec<f64> = q.table().iter().copied().filter(|&v| v >= 0.0).collect();
    let direct_value = q.l1_norm();
    let formula_value = match negatives.len() {
        0 => return Err(PostquantumError::NoNegativeEntry),
        1 => 1.0 - 2.0 * negatives[0],
        2 => 2.0 * (nonnegatives[0] + nonnegatives[1]) - 1.0,
        3 => 2.0 * nonnegatives[0] - 1.0,
        _ => unreachable!("unit sum forbids four negative entries"),
    };
    if (formula_value - direct_value).abs() > CASE_FORMULA_TOL {
        return Err(PostquantumError::CaseMismatch {
            formula_value,
            direct_value,
        });
    }
    Ok(CaseCheck {
        negatives: negatives.len(),
        formula_value,
        direct_value,
    })
}

/// Grid-plus-refinement result, including the best value seen per
/// negative-entry count (index = count; index 0 is the all-nonnegative case).
#[derive(Debug, Clone, Serialize)]
pub struct RealSupReport {
    pub sup_found: f64,
    pub argmax: RealQuasiDistribution,
    pub case_maxima: [Option<f64>; 4],
}

/// Maximizes the l1 norm over real 2x2 tables with unit sum and entries in
/// [-1, 1] by exhaustive grid over three free entries (the fourth is fixed by
/// the sum), then local coordinate refinement with halving radius. This is an
/// independent numerical oracle for the closed-form supremum of 3.
pub fn real_sup_search_detailed(grid_step: f64, refine_iters: usize) -> RealSupReport {
    assert!(
        grid_step > 0.0 && grid_step <= 0.5,
        "grid step must lie in (0, 0.5]"
    );
    let edge = 1.0 + GRID_EDGE_TOL;
    let steps = ((2.0 + grid_step * 1e-6) / grid_step).floor() as usize;
    let value_at = |k: usize| (-1.0 + k as f64 * grid_step).min(1.0);

    let l1_of = |t: &[f64; 4]| t.iter().map(|v| v.abs()).sum::<f64>();
    let negatives_of = |t: &[f64; 4]| t.iter().filter(|&&v| v < 0.0).count();

    let mut best: Option<([f64; 4], f64)> = None;
    let mut case_maxima: [Option<f64>; 4] = [None; 4];
    let mut note = |table: [f64; 4], value: f64| {
        let case = negatives_of(&table);
        if case_maxima[case].is_none_or(|m| value > m) {
            case_maxima[case] = Some(value);
        }
        if best.as_ref().is_none_or(|&(_, b)| value > b) {
            best = Some((table, value));
        }
    };
    for i in 0..=steps {
        let a = value_at(i);
        for j in 0..=steps {
            let b = value_at(j);
            for k in 0..=steps {
                let c = value_at(k);
                let d = 1.0 - a - b - c;
                if d.abs() > edge {
                    continue;
                }
                let table = [a, b, c, d];
                note(table, l1_of(&table));
            }
        }
    }
    let (mut point, mut value) = best.expect("grid always contains valid tables");

    let mut radius = grid_step / 2.0;
    for _ in 0..refine_iters {
        for coord in 0..3 {
            for sign in [1.0, -1.0] {
                let mut trial = point;
                trial[coord] += sign * radius;
                trial[3] = 1.0 - trial[0] - trial[1] - trial[2];
                if trial.iter().any(|v| v.abs() > edge) {
                    continue;
                }
                let trial_value = l1_of(&trial);
                if trial_value > value {
                    point = trial;
                    value = trial_value;
                }
            }
        }
        radius *= 0.5;
    }
    let case = negatives_of(&point);
    if case_maxima[case].is_none_or(|m| value > m) {
        case_maxima[case] = Some(value);
    }
    let argmax =
        make_real_quasi(2, 2, point.to_vec()).expect("search only visits valid tables");
    RealSupReport {
        sup_found: value,
        argmax,
        case_maxima,
    }
}

/// Best l1 value and its table; see the detailed variant for per-case maxima.
pub fn real_sup_search(grid_step: f64, refine_iters: usize) -> (f64, RealQuasiDistribution) {
    let report = real_sup_search_detailed(grid_step, refine_iters);
    (report.sup_found, report.argmax)
}

#[derive(Serialize, Deserialize)]
struct QuasiRepr {
    dims: [usize; 2],
    entries: Vec<[f64; 2]>,
    kind: String,
}

const KIND_TAG: &str = "postquantum";

impl Serialize for QuasiDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        QuasiRepr {
            dims: [self.rows, self.cols],
            entries: self.table.iter().map(|z| [z.re, z.im]).collect(),
            kind: KIND_TAG.to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QuasiDistribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = QuasiRepr::deserialize(deserializer)?;
        if repr.kind != KIND_TAG {
            return Err(D::Error::custom(PostquantumError::UnknownKind {
                kind: repr.kind,
            }));
        }
        let table = repr
            .entries
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        make_quasi(repr.dims[0], repr.dims[1], table).map_err(D::Error::custom)
    }
}

impl Serialize for RealQuasiDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_quasi().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RealQuasiDistribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let quasi = QuasiDistribution::deserialize(deserializer)?;
        let mut table = Vec::with_capacity(quasi.table.len());
        for z in &quasi.table {
            if z.im != 0.0 {
                return Err(D::Error::custom(PostquantumError::NotReal { im: z.im }));
            }
            table.push(z.re);
        }
        Ok(RealQuasiDistribution {
            rows: quasi.rows,
            cols: quasi.cols,
            table,
        })
    }
}
