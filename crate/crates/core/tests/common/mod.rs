//! Shared random-instance generation for the integration campaigns.

use kdq_core::kd::KdInstance;
use kdq_core::quantum::{random_density, random_povm, random_pvm, Povm, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementKind {
    Projective,
    General,
    Mixed,
}

/// One measurement of the requested kind; general measurements get one more
/// outcome than the dimension so they are never secretly projective.
pub fn random_measurement(dim: usize, kind: MeasurementKind, rng: &mut SeededRng) -> Povm {
    let projective = match kind {
        MeasurementKind::Projective => true,
        MeasurementKind::General => false,
        MeasurementKind::Mixed => rng.coin(),
    };
    if projective {
        random_pvm(dim, rng)
    } else {
        random_povm(dim, dim + 1, rng).expect("sampler yields valid measurements")
    }
}

/// A state of random rank with `n_measurements` independent measurements.
pub fn random_instance(
    dim: usize,
    n_measurements: usize,
    kind: MeasurementKind,
    rng: &mut SeededRng,
) -> KdInstance {
    let rank = rng.index(dim) + 1;
    let state = random_density(dim, rank, rng).expect("sampler yields valid states");
    let measurements = (0..n_measurements)
        .map(|_| random_measurement(dim, kind, rng))
        .collect();
    KdInstance {
        state,
        measurements,
    }
}
