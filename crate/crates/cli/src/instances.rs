//! Random instance sampling for campaigns: states of random rank paired with
//! projective or general measurements.

use clap::ValueEnum;
use kdq_core::kd::KdInstance;
use kdq_core::quantum::{
    random_povm, random_pvm, random_state_of_random_rank, Povm, QuantumError, SeededRng,
};

/// Measurement ensemble a campaign draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeasurementChoice {
    /// Rank-one projective measurements only.
    Pvm,
    /// General positive-operator measurements only.
    Povm,
    /// A fair coin decides per measurement.
    Mixed,
}

impl MeasurementChoice {
    pub fn label(self) -> &'static str {
        match self {
            MeasurementChoice::Pvm => "pvm",
            MeasurementChoice::Povm => "povm",
            MeasurementChoice::Mixed => "mixed",
        }
    }
}

pub fn random_measurement(
    dim: usize,
    choice: MeasurementChoice,
    rng: &mut SeededRng,
) -> Result<Povm, QuantumError> {
    let projective = match choice {
        MeasurementChoice::Pvm => true,
        MeasurementChoice::Povm => false,
        MeasurementChoice::Mixed => rng.coin(),
    };
    if projective {
        Ok(random_pvm(dim, rng))
    } else {
        // One extra outcome so general measurements are never square.
        random_povm(dim, dim + 1, rng)
    }
}

pub fn random_instance(
    dim: usize,
    n_measurements: usize,
    choice: MeasurementChoice,
    rng: &mut SeededRng,
) -> Result<KdInstance, QuantumError> {
    let state = random_state_of_random_rank(dim, rng);
    let measurements = (0..n_measurements)
        .map(|_| random_measurement(dim, choice, rng))
        .collect::<Result<_, _>>()?;
    Ok(KdInstance {
        state,
        measurements,
    })
}
