//! Kirkwood-Dirac quasiprobability distributions.
//!
//! A table entry is tr(rho E_x F_y ...) for one outcome tuple, with the
//! measurement operators multiplied in list order. Entries are complex; the
//! table always sums to 1, marginals reproduce the Born probabilities, and
//! negativity or an imaginary part anywhere is exactly what the witness and
//! bound machinery downstream quantifies.

pub mod bounds;

pub use bounds::{
    bound_suite, entrywise_bounds_check, sum_sq_bound_check, support_uncertainty_check,
    BoundCheck, BoundReport, BoundStatus, ReportMetadata,
};

use crate::linalg::{trace_of_product, Complex64, ComplexMatrix, LinalgError};
use crate::postquantum::{make_quasi, PostquantumError, QuasiDistribution};
use crate::quantum::{DensityMatrix, Povm, QuantumError};
use crate::tolerances::Tolerances;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Errors from distribution construction and analysis.
#[derive(Debug, Error)]
pub enum KdError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Postquantum(#[from] PostquantumError),
    #[error("no measurements supplied")]
    NoMeasurements,
    #[error("measurement {index} has dimension {dim}, state has {expected}")]
    DimMismatch {
        index: usize,
        dim: usize,
        expected: usize,
    },
    #[error("table entry count {actual} does not match outcome grid {expected}")]
    EntryCount { expected: usize, actual: usize },
    #[error("table sum deviates from 1 by {deviation:.3e}")]
    UnitSumViolation { deviation: f64 },
    #[error("entry modulus {modulus} exceeds 1 beyond tolerance")]
    ModulusViolation { modulus: f64 },
    #[error("witness tests disagree: l1 excess {excess:.3e} vs max entry gap {max_gap:.3e}")]
    WitnessMismatch { excess: f64, max_gap: f64 },
    #[error("operation requires exactly two measurements, table has {n}")]
    NotTwoMeasurements { n: usize },
    #[error("group split {split} out of range for {n} measurements")]
    BadGroupSplit { split: usize, n: usize },
    #[error("alpha {alpha} below minimum {min}")]
    AlphaOutOfRange { alpha: f64, min: f64 },
}

/// Quasiprobability table over one outcome index per measurement, stored
/// row-major with the first measurement slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct KdDistribution {
    dims: Vec<usize>,
    table: Vec<Complex64>,
    state_ref: String,
    measurement_refs: Vec<String>,
}

impl KdDistribution {
    /// Validating constructor: outcome-grid shape, unit sum, entry moduli.
    pub fn from_parts(
        dims: Vec<usize>,
        table: Vec<Complex64>,
        state_ref: String,
        measurement_refs: Vec<String>,
    ) -> Result<Self, KdError> {
        let tol = Tolerances::standard();
        let expected: usize = dims.iter().product();
        if dims.is_empty() || measurement_refs.len() != dims.len() {
            return Err(KdError::NoMeasurements);
        }
        if table.len() != expected || expected == 0 {
            return Err(KdError::EntryCount {
                expected,
                actual: table.len(),
            });
        }
        let sum: Complex64 = table.iter().sum();
        let deviation = (sum - Complex64::ONE).norm();
        if deviation > tol.unit_sum {
            return Err(KdError::UnitSumViolation { deviation });
        }
        let max_modulus = table.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max_modulus > 1.0 + tol.entry_modulus {
            return Err(KdError::ModulusViolation {
                modulus: max_modulus,
            });
        }
        Ok(KdDistribution {
            dims,
            table,
            state_ref,
            measurement_refs,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_measurements(&self) -> usize {
        self.dims.len()
    }

    pub fn outcome_count(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[Complex64] {
        &self.table
    }

    /// Entry at a full outcome tuple.
    pub fn entry(&self, indices: &[usize]) -> Complex64 {
        assert_eq!(indices.len(), self.dims.len(), "tuple arity mismatch");
        let mut flat = 0;
        for (k, &i) in indices.iter().enumerate() {
            assert!(i < self.dims[k], "outcome index out of range");
            flat = flat * self.dims[k] + i;
        }
        self.table[flat]
    }

    /// Two-measurement accessor.
    pub fn at(&self, x: usize, y: usize) -> Complex64 {
        assert_eq!(self.dims.len(), 2, "at() needs a two-measurement table");
        self.table[x * self.dims[1] + y]
    }

    pub fn sum(&self) -> Complex64 {
        self.table.iter().sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.table.iter().map(|z| z.norm()).sum()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.table.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Sum of |q|^alpha over the table.
    pub fn power_sum(&self, alpha: f64) -> f64 {
        self.table.iter().map(|z| z.norm().powf(alpha)).sum()
    }

    pub fn state_ref(&self) -> &str {
        &self.state_ref
    }

    pub fn measurement_refs(&self) -> &[String] {
        &self.measurement_refs
    }
}

/// Ordered product distribution q(x1..xn) = tr(rho E_x1 ... E_xn).
pub fn kd_distribution_n(
    rho: &DensityMatrix,
    povms: &[&Povm],
) -> Result<KdDistribution, KdError> {
    if povms.is_empty() {
        return Err(KdError::NoMeasurements);
    }
    let d = rho.dim();
    for (index, p) in povms.iter().enumerate() {
        if p.dim() != d {
            return Err(KdError::DimMismatch {
                index,
                dim: p.dim(),
                expected: d,
            });
        }
    }
    let dims: Vec<usize> = povms.iter().map(|p| p.len()).collect();
    let mut table = Vec::with_capacity(dims.iter().product());
    walk_products(rho.matrix(), povms, 0, &mut table);

    let state_ref = digest_ref("state", &[rho.matrix()]);
    let measurement_refs = povms
        .iter()
        .map(|p| {
            let mats: Vec<&ComplexMatrix> = p.elements().iter().collect();
            digest_ref("povm", &mats)
        })
        .collect();
    KdDistribution::from_parts(dims, table, state_ref, measurement_refs)
}

/// Two-measurement form q(x, y) = tr(rho E_x F_y).
pub fn kd_distribution(
    rho: &DensityMatrix,
    x: &Povm,
    y: &Povm,
) -> Result<KdDistribution, KdError> {
    kd_distribution_n(rho, &[x, y])
}

/// Depth-first prefix products; the leaf level uses the cheap product trace.
fn walk_products(
    prefix: &ComplexMatrix,
    povms: &[&Povm],
    level: usize,
    table: &mut Vec<Complex64>,
) {
    if level + 1 == povms.len() {
        for e in povms[level].elements() {
            table.push(trace_of_product(prefix, e));
        }
        return;
    }
    for e in povms[level].elements() {
        let next = prefix.matmul(e).expect("dims already checked");
        walk_products(&next, povms, level + 1, table);
    }
}

fn digest_ref(prefix: &str, mats: &[&ComplexMatrix]) -> String {
    let mut hasher = Sha256::new();
    for m in mats {
        hasher.update((m.dim() as u64).to_le_bytes());
        for z in m.entries() {
            hasher.update(z.re.to_le_bytes());
            hasher.update(z.im.to_le_bytes());
        }
    }
    let digest = hasher.finalize();
    let hex: String = digest[..6].iter().map(|b| format!("{b:02x}")).collect();
    format!("{prefix}:{hex}")
}

/// One real probability vector per measurement, obtained by summing out all
/// other indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalSet {
    probs: Vec<Vec<f64>>,
}

impl MarginalSet {
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn measurement(&self, k: usize) -> &[f64] {
        &self.probs[k]
    }

    pub fn all(&self) -> &[Vec<f64>] {
        &self.probs
    }
}

/// Marginals of a KD table are ordinary Born probabilities; the imaginary
/// parts cancel when any complete measurement is summed out.
pub fn marginals(q: &KdDistribution) -> MarginalSet {
    let tol = Tolerances::standard();
    let n = q.n_measurements();
    let dims = q.dims();
    let mut strides = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let mut probs: Vec<Vec<f64>> = dims.iter().map(|&m| vec![0.0; m]).collect();
    for (flat, z) in q.table().iter().enumerate() {
        for k in 0..n {
            let digit = (flat / strides[k]) % dims[k];
            probs[k][digit] += z.re;
        }
    }
    for p in &probs {
        let total: f64 = p.iter().sum();
        debug_assert!((total - 1.0).abs() <= tol.unit_sum * 10.0);
        for &v in p {
            debug_assert!(v >= -tol.unit_sum && v <= 1.0 + tol.unit_sum);
        }
    }
    MarginalSet { probs }
}

/// Outcome of the nonclassicality test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Witness {
    pub nonclassical: bool,
    pub l1: f64,
    pub excess: f64,
    pub max_entry_gap: f64,
}

/// Flags tables whose l1 norm exceeds 1. Two equivalent tests run with
/// matched margins (the global excess and the worst per-entry gap |q| - Re q);
/// disagreement means the table is numerically corrupt and is an error.
pub fn nonclassicality_witness(q: &KdDistribution) -> Result<Witness, KdError> {
    let tol = Tolerances::standard();
    let l1 = q.l1_norm();
    let excess = l1 - 1.0;
    let max_gap = q
        .table()
        .iter()
        .map(|z| z.norm() - z.re)
        .fold(0.0, f64::max);
    let by_excess = excess > tol.witness;
    let by_entry = max_gap > tol.witness / q.outcome_count() as f64;
    if by_excess != by_entry {
        return Err(KdError::WitnessMismatch { excess, max_gap });
    }
    Ok(Witness {
        nonclassical: by_excess,
        l1,
        excess,
        max_entry_gap: max_gap,
    })
}

/// Support sizes of a two-measurement table at a magnitude threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportCounts {
    pub n_x: usize,
    pub n_y: usize,
    pub n_xy: usize,
}

/// Counts marginal entries and table entries above `threshold`.
pub fn support_counts(q: &KdDistribution, threshold: f64) -> Result<SupportCounts, KdError> {
    if q.n_measurements() != 2 {
        return Err(KdError::NotTwoMeasurements {
            n: q.n_measurements(),
        });
    }
    let m = marginals(q);
    let n_x = m.measurement(0).iter().filter(|&&p| p > threshold).count();
    let n_y = m.measurement(1).iter().filter(|&&p| p > threshold).count();
    let n_xy = q.table().iter().filter(|z| z.norm() > threshold).count();
    // No product assertion here: |q|^2 <= p_x p_y only pushes marginals above
    // threshold^2, so n_xy <= n_x n_y is a checked bound, not an invariant.
    Ok(SupportCounts { n_x, n_y, n_xy })
}

/// Flattens the first `split` measurements against the rest, producing a
/// two-index quasiprobability table. Row-major layout makes this a reshape.
pub fn bipartition(q: &KdDistribution, split: usize) -> Result<QuasiDistribution, KdError> {
    let n = q.n_measurements();
    if split == 0 || split >= n {
        return Err(KdError::BadGroupSplit { split, n });
    }
    let rows: usize = q.dims()[..split].iter().product();
    let cols: usize = q.dims()[split..].iter().product();
    Ok(make_quasi(rows, cols, q.table().to_vec())?)
}

/// A state with the measurements applied to it; the unit a campaign draws,
/// serializes, and replays.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KdInstance {
    pub state: DensityMatrix,
    pub measurements: Vec<Povm>,
}

impl KdInstance {
    pub fn two(state: DensityMatrix, x: Povm, y: Povm) -> Self {
        KdInstance {
            state,
            measurements: vec![x, y],
        }
    }

    pub fn distribution(&self) -> Result<KdDistribution, KdError> {
        let refs: Vec<&Povm> = self.measurements.iter().collect();
        kd_distribution_n(&self.state, &refs)
    }
}

#[derive(Serialize, Deserialize)]
struct KdRepr {
    dims: Vec<usize>,
    entries: Vec<[f64; 2]>,
    state_ref: String,
    measurement_refs: Vec<String>,
}

impl Serialize for KdDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        KdRepr {
            dims: self.dims.clone(),
            entries: self.table.iter().map(|z| [z.re, z.im]).collect(),
            state_ref: self.state_ref.clone(),
            measurement_refs: self.measurement_refs.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for KdDistribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = KdRepr::deserialize(deserializer)?;
        let table = repr
            .entries
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        KdDistribution::from_parts(repr.dims, table, repr.state_ref, repr.measurement_refs)
            .map_err(D::Error::custom)
    }
}
