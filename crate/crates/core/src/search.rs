//! Extremal search over pure states and projective bases, probing how close
//! the l1 and squared-sum bounds come to being tight.
//!
//! Searches are derivative-free: every candidate is a raw parameter vector
//! (state amplitudes plus one Hermitian generator per basis), realized into a
//! state and two rank-1 projective measurements, and scored through the
//! distribution module. Restarts are independent, seeded per index, and
//! merged deterministically.

use crate::kd::{kd_distribution, KdDistribution, KdError, KdInstance};
use crate::linalg::{Complex64, ComplexMatrix, LinalgError};
use crate::quantum::{pure_state, random_pure, random_pvm, Povm, QuantumError, SeededRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Initial coordinate step in radians/amplitude units.
const INITIAL_STEP: f64 = 0.3;
/// Step shrink factor after a pass with no improvement.
const STEP_SHRINK: f64 = 0.5;
/// Search stops once the step falls below this.
const STEP_FLOOR: f64 = 1e-6;
/// Keep instances whose l1 norm clears 1 by this much.
const HARVEST_MARGIN: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Kd(#[from] KdError),
    #[error("dimension must be at least 2, got {dim}")]
    BadDim { dim: usize },
    #[error("restarts, iterations, and sample counts must be at least 1")]
    BadBudget,
    #[error("parameter vector length {actual} does not match {expected} for dimension {dim}")]
    ParamLen {
        dim: usize,
        expected: usize,
        actual: usize,
    },
    #[error("state parameters are numerically zero")]
    DegenerateState,
    #[error("realized matrix deviates from unitarity by {deviation:.3e}")]
    NotUnitary { deviation: f64 },
}

/// Hermitian-generator coordinates for one unitary: the first `dim` entries
/// are the diagonal, followed by (re, im) pairs for each upper off-diagonal
/// element in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryParams {
    dim: usize,
    params: Vec<f64>,
}

impl UnitaryParams {
    pub fn new(dim: usize, params: Vec<f64>) -> Result<Self, SearchError> {
        let expected = dim * dim;
        if dim == 0 || params.len() != expected {
            return Err(SearchError::ParamLen {
                dim,
                expected,
                actual: params.len(),
            });
        }
        Ok(UnitaryParams { dim, params })
    }

    pub fn random(dim: usize, rng: &mut SeededRng) -> Self {
        let params = (0..dim * dim)
            .map(|_| rng.uniform(-std::f64::consts::PI, std::f64::consts::PI))
            .collect();
        UnitaryParams { dim, params }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// The Hermitian generator encoded by the coordinates.
    pub fn generator(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut h = ComplexMatrix::zeros(d);
        for i in 0..d {
            h.set(i, i, Complex64::new(self.params[i], 0.0));
        }
        let mut k = d;
        for i in 0..d {
            for j in (i + 1)..d {
                let z = Complex64::new(self.params[k], self.params[k + 1]);
                h.set(i, j, z);
                h.set(j, i, z.conj());
                k += 2;
            }
        }
        h
    }

    /// Realizes exp(i H) through the eigendecomposition of the generator.
    pub fn to_unitary(&self) -> Result<ComplexMatrix, SearchError> {
        let eig = self.generator().hermitian_eig()?;
        let d = self.dim;
        let v = &eig.eigenvectors;
        let phases: Vec<Complex64> = eig
            .eigenvalues
            .iter()
            .map(|&lambda| Complex64::from_polar(1.0, lambda))
            .collect();
        let scaled = ComplexMatrix::from_fn(d, |r, c| v.get(r, c) * phases[c]);
        let u = scaled.matmul(&v.conjugate_transpose())?;
        let deviation = u
            .conjugate_transpose()
            .matmul(&u)?
            .max_abs_diff(&ComplexMatrix::identity(d));
        if deviation > 1e-9 {
            return Err(SearchError::NotUnitary { deviation });
        }
        Ok(u)
    }

    /// Rank-1 projective measurement onto the unitary's columns.
    pub fn to_pvm(&self) -> Result<Povm, SearchError> {
        let u = self.to_unitary()?;
        let d = self.dim;
        let elements = (0..d)
            .map(|col| {
                let column: Vec<Complex64> = (0..d).map(|row| u.get(row, col)).collect();
                ComplexMatrix::outer(&column)
            })
            .collect();
        Ok(Povm::new(elements)?)
    }
}

/// What the search maximizes over the distribution's entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    L1,
    L2,
}

impl Objective {
    pub fn evaluate(&self, q: &KdDistribution) -> f64 {
        match self {
            Objective::L1 => q.l1_norm(),
            Objective::L2 => q.l2_norm_sq(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Objective::L1 => "l1",
            Objective::L2 => "l2",
        }
    }
}

/// Outcome of a multi-restart maximization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchResult {
    pub objective: String,
    pub best_value: f64,
    pub best_instance: KdInstance,
    /// Total objective evaluations across all restarts.
    pub iterations: usize,
    pub seed: u64,
    /// Best-so-far (evaluation index, value) pairs from the winning restart.
    pub trace: Vec<(usize, f64)>,
}

/// Maximizes the l1 norm over pure states and two rank-1 projective bases.
pub fn maximize_l1(
    dim: usize,
    rng: &SeededRng,
    restarts: usize,
    iters: usize,
) -> Result<SearchResult, SearchError> {
    maximize(dim, Objective::L1, rng, restarts, iters)
}

/// Maximizes the squared-modulus sum over the same family.
pub fn maximize_l2(
    dim: usize,
    rng: &SeededRng,
    restarts: usize,
    iters: usize,
) -> Result<SearchResult, SearchError> {
    maximize(dim, Objective::L2, rng, restarts, iters)
}

fn maximize(
    dim: usize,
    objective: Objective,
    rng: &SeededRng,
    restarts: usize,
    iters: usize,
) -> Result<SearchResult, SearchError> {
    if dim < 2 {
        return Err(SearchError::BadDim { dim });
    }
    if restarts == 0 || iters == 0 {
        return Err(SearchError::BadBudget);
    }
    let starts: Vec<Vec<f64>> = (0..restarts)
        .map(|r| {
            let mut restart_rng = rng.derive(r as u64);
            if r == 0 && dim == 2 {
                canonical_start()
            } else {
                random_start(dim, &mut restart_rng)
            }
        })
        .collect();

    let outcomes: Vec<RestartOutcome> = starts
        .into_par_iter()
        .map(|start| run_restart(dim, objective, start, iters))
        .collect();

    let iterations = outcomes.iter().map(|o| o.evaluations).sum();
    // Strict improvement keeps the lowest restart index on ties.
    let winner = outcomes
        .into_iter()
        .reduce(|best, cand| if cand.value > best.value { cand } else { best })
        .expect("at least one restart");

    let best_instance = instance_from_params(dim, &winner.params)?;
    Ok(SearchResult {
        objective: objective.name().to_string(),
        best_value: winner.value,
        best_instance,
        iterations,
        seed: rng.seed(),
        trace: winner.trace,
    })
}

struct RestartOutcome {
    params: Vec<f64>,
    value: f64,
    evaluations: usize,
    trace: Vec<(usize, f64)>,
}

/// Greedy coordinate pattern search with shrinking step.
fn run_restart(dim: usize, objective: Objective, start: Vec<f64>, iters: usize) -> RestartOutcome {
    let mut params = start;
    let mut evaluations = 0usize;
    let mut value = objective_value(dim, objective, &params);
    evaluations += 1;
    let mut trace = vec![(evaluations, value)];

    let mut step = INITIAL_STEP;
    for _ in 0..iters {
        let mut improved = false;
        for coord in 0..params.len() {
            for sign in [1.0, -1.0] {
                let mut trial = params.clone();
                trial[coord] += sign * step;
                let trial_value = objective_value(dim, objective, &trial);
                evaluations += 1;
                if trial_value > value {
                    params = trial;
                    value = trial_value;
                    trace.push((evaluations, value));
                    improved = true;
                }
            }
        }
        if !improved {
            step *= STEP_SHRINK;
            if step < STEP_FLOOR {
                break;
            }
        }
    }
    RestartOutcome {
        params,
        value,
        evaluations,
        trace,
    }
}

/// Scores a parameter vector; infeasible points rank below everything.
fn objective_value(dim: usize, objective: Objective, params: &[f64]) -> f64 {
    match instance_from_params(dim, params) {
        Ok(instance) => {
            let q = instance
                .distribution()
                .expect("dimensions agree by construction");
            objective.evaluate(&q)
        }
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Layout: 2*dim state amplitudes (re, im), then one generator per basis.
fn instance_from_params(dim: usize, params: &[f64]) -> Result<KdInstance, SearchError> {
    let expected = 2 * dim + 2 * dim * dim;
    if params.len() != expected {
        return Err(SearchError::ParamLen {
            dim,
            expected,
            actual: params.len(),
        });
    }
    let (state_part, rest) = params.split_at(2 * dim);
    let (hx, hy) = rest.split_at(dim * dim);
    let amplitudes: Vec<Complex64> = state_part
        .chunks_exact(2)
        .map(|pair| Complex64::new(pair[0], pair[1]))
        .collect();
    if amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>() < 1e-12 {
        return Err(SearchError::DegenerateState);
    }
    let state = pure_state(&amplitudes)?;
    let x = UnitaryParams::new(dim, hx.to_vec())?.to_pvm()?;
    let y = UnitaryParams::new(dim, hy.to_vec())?.to_pvm()?;
    Ok(KdInstance::two(state, x, y))
}

fn random_start(dim: usize, rng: &mut SeededRng) -> Vec<f64> {
    let mut params = Vec::with_capacity(2 * dim + 2 * dim * dim);
    for _ in 0..2 * dim {
        params.push(rng.normal());
    }
    params.extend_from_slice(UnitaryParams::random(dim, rng).params());
    params.extend_from_slice(UnitaryParams::random(dim, rng).params());
    params
}

/// Qubit start known to be strongly nonclassical: the state |0>, the basis
/// halfway between the computational axes, and a basis tilted 30 degrees.
/// Both generators are written so that exp(i H) reproduces the bases exactly.
fn canonical_start() -> Vec<f64> {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};
    let r = FRAC_PI_2 / 2.0_f64.sqrt();
    let mut params = vec![1.0, 0.0, 0.0, 0.0];
    // exp(i (pi/2)(I - U)) = U for any Hermitian involution U.
    params.extend_from_slice(&[FRAC_PI_2 - r, FRAC_PI_2 + r, -r, 0.0]);
    // A rotation by pi/6 comes from the generator -(pi/6) sigma_y.
    params.extend_from_slice(&[0.0, 0.0, 0.0, FRAC_PI_6]);
    params
}

/// One retained sample from a random sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarvestedInstance {
    pub instance: KdInstance,
    pub l1: f64,
    pub sample_index: usize,
}

/// Samples random (pure state, two rank-1 bases) instances and keeps the ones
/// whose l1 norm clears 1, sorted by decreasing l1 with index ties stable.
pub fn harvest_violations(
    dim: usize,
    rng: &SeededRng,
    count: usize,
) -> Result<Vec<HarvestedInstance>, SearchError> {
    if dim < 2 {
        return Err(SearchError::BadDim { dim });
    }
    if count == 0 {
        return Err(SearchError::BadBudget);
    }
    let sampled: Result<Vec<HarvestedInstance>, SearchError> = (0..count)
        .into_par_iter()
        .map(|sample_index| {
            let mut sample_rng = rng.derive(sample_index as u64);
            let state = random_pure(dim, &mut sample_rng);
            let x = random_pvm(dim, &mut sample_rng);
            let y = random_pvm(dim, &mut sample_rng);
            let l1 = kd_distribution(&state, &x, &y)?.l1_norm();
            Ok(HarvestedInstance {
                instance: KdInstance::two(state, x, y),
                l1,
                sample_index,
            })
        })
        .collect();
    let mut kept: Vec<HarvestedInstance> = sampled?
        .into_iter()
        .filter(|h| h.l1 > 1.0 + HARVEST_MARGIN)
        .collect();
    kept.sort_by(|a, b| {
        b.l1.total_cmp(&a.l1)
            .then(a.sample_index.cmp(&b.sample_index))
    });
    Ok(kept)
}
