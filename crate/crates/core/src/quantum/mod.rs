//! Quantum states and measurements with validating constructors.
//!
//! Nothing in this module trusts its inputs: density matrices are checked for
//! hermiticity, unit trace, and positivity; POVMs for element positivity and
//! completeness. The projective flag on a POVM is always computed here, never
//! accepted from a caller or a serialized file.

mod random;

pub use random::{
    diagonal_state, haar_unitary, random_density, random_povm, random_pure, random_pvm,
    random_state_of_random_rank, SeededRng,
};

use crate::linalg::{trace_of_product, Complex64, ComplexMatrix, LinalgError};
use crate::tolerances::Tolerances;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Errors from state and measurement validation or sampling.
#[derive(Debug, Error)]
pub enum QuantumError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("state vector has zero norm")]
    ZeroNorm,
    #[error("dimension must be at least 1")]
    ZeroDim,
    #[error("trace deviates from 1 by {deviation:.3e}")]
    TraceNotOne { deviation: f64 },
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },
    #[error("purity {purity} outside [1/{dim}, 1]")]
    PurityOutOfRange { purity: f64, dim: usize },
    #[error("POVM needs at least one element")]
    EmptyPovm,
    #[error("POVM element {index} has dimension {dim}, expected {expected}")]
    MixedDims {
        index: usize,
        dim: usize,
        expected: usize,
    },
    #[error("POVM element {index} is not Hermitian: deviation {deviation:.3e}")]
    ElementNotHermitian { index: usize, deviation: f64 },
    #[error("POVM element {index} is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    ElementNotPsd { index: usize, min_eigenvalue: f64 },
    #[error("POVM elements sum deviates from the identity by {deviation:.3e}")]
    Incomplete { deviation: f64 },
    #[error("rank {rank} outside [1, {dim}]")]
    RankOutOfRange { rank: usize, dim: usize },
    #[error("POVM normalization stayed singular after {attempts} attempts")]
    SingularNormalization { attempts: usize },
}

/// Validated density matrix with its purity cached at construction.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    purity: f64,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace, positivity, and the purity range.
    pub fn new(mat: ComplexMatrix) -> Result<Self, QuantumError> {
        let tol = Tolerances::standard();
        let deviation = mat.hermiticity_deviation();
        if deviation > tol.hermiticity {
            return Err(LinalgError::NotHermitian { deviation }.into());
        }
        let tr = mat.trace();
        let trace_deviation = (tr - Complex64::ONE).norm();
        if trace_deviation > tol.unit_trace {
            return Err(QuantumError::TraceNotOne {
                deviation: trace_deviation,
            });
        }
        let eig = mat.hermitian_eig()?;
        if eig.eigenvalues[0] < -tol.psd {
            return Err(QuantumError::NotPsd {
                min_eigenvalue: eig.eigenvalues[0],
            });
        }
        // tr(rho^2) of a Hermitian matrix is the squared Frobenius norm.
        let purity: f64 = mat.entries().iter().map(|z| z.norm_sqr()).sum();
        let dim = mat.dim();
        if purity < 1.0 / dim as f64 - tol.psd || purity > 1.0 + tol.psd {
            return Err(QuantumError::PurityOutOfRange { purity, dim });
        }
        Ok(DensityMatrix { mat, purity })
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// tr(rho^2), cached at validation time.
    pub fn purity(&self) -> f64 {
        self.purity
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }
}

/// Normalizes a state vector and returns the rank-one density matrix.
pub fn pure_state(amplitudes: &[Complex64]) -> Result<DensityMatrix, QuantumError> {
    if amplitudes.is_empty() {
        return Err(QuantumError::ZeroDim);
    }
    // Scale by the largest component first so tiny vectors normalize without
    // underflow.
    let max_abs = amplitudes.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max_abs == 0.0 || !max_abs.is_finite() {
        return Err(QuantumError::ZeroNorm);
    }
    let scaled: Vec<Complex64> = amplitudes.iter().map(|z| z / max_abs).collect();
    let norm = scaled.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let unit: Vec<Complex64> = scaled.iter().map(|z| z / norm).collect();
    DensityMatrix::new(ComplexMatrix::outer(&unit))
}

/// The state 1/d, the unique density matrix with minimal purity.
pub fn maximally_mixed(dim: usize) -> Result<DensityMatrix, QuantumError> {
    if dim == 0 {
        return Err(QuantumError::ZeroDim);
    }
    DensityMatrix::new(ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64))
}

/// Validated POVM. Elements are positive semidefinite and sum to the
/// identity; zero elements are allowed.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
    projective: bool,
}

impl Povm {
    /// Validates every element and computes the projective flag.
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self, QuantumError> {
        let tol = Tolerances::standard();
        if elements.is_empty() {
            return Err(QuantumError::EmptyPovm);
        }
        let dim = elements[0].dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for (index, e) in elements.iter().enumerate() {
            if e.dim() != dim {
                return Err(QuantumError::MixedDims {
                    index,
                    dim: e.dim(),
                    expected: dim,
                });
            }
            let deviation = e.hermiticity_deviation();
            if deviation > tol.hermiticity {
                return Err(QuantumError::ElementNotHermitian { index, deviation });
            }
            let eig = e.hermitian_eig()?;
            if eig.eigenvalues[0] < -tol.psd {
                return Err(QuantumError::ElementNotPsd {
                    index,
                    min_eigenvalue: eig.eigenvalues[0],
                });
            }
            sum = sum.add(e);
        }
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if deviation > tol.completeness {
            return Err(QuantumError::Incomplete { deviation });
        }
        let projective = compute_projective(&elements, tol.projective);
        Ok(Povm {
            elements,
            projective,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &ComplexMatrix {
        &self.elements[i]
    }

    /// True when E_i E_j = delta_ij E_i held entrywise at validation time.
    pub fn is_projective(&self) -> bool {
        self.projective
    }

    /// The computational-basis PVM {|i><i|}.
    pub fn computational(dim: usize) -> Self {
        let elements = (0..dim)
            .map(|i| {
                ComplexMatrix::from_fn(dim, |r, c| {
                    if r == i && c == i {
                        Complex64::ONE
                    } else {
                        Complex64::ZERO
                    }
                })
            })
            .collect();
        Povm::new(elements).expect("computational basis is a valid PVM")
    }

    /// The trivial single-outcome measurement {1}.
    pub fn trivial(dim: usize) -> Self {
        Povm::new(vec![ComplexMatrix::identity(dim)]).expect("identity is a valid POVM")
    }
}

fn compute_projective(elements: &[ComplexMatrix], tol: f64) -> bool {
    for (i, a) in elements.iter().enumerate() {
        for (j, b) in elements.iter().enumerate() {
            let product = a.matmul(b).expect("dims already checked");
            let deviation = if i == j {
                product.max_abs_diff(a)
            } else {
                product.max_abs()
            };
            if deviation > tol {
                return false;
            }
        }
    }
    true
}

/// Largest tr(E_x F_y) over element pairs of two measurements. Real because
/// both factors are Hermitian; nonnegative because both are PSD.
pub fn max_overlap(x: &Povm, y: &Povm) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for e in x.elements() {
        for f in y.elements() {
            best = best.max(trace_of_product(e, f).re);
        }
    }
    best
}

/// A qubit instance whose quasiprobabilities leave the classical range: the
/// state |0><0| measured in the Hadamard basis and in a tilted basis whose
/// overlap pushes one entry above both marginals' minimum.
pub fn nonclassical_qubit_example() -> (DensityMatrix, Povm, Povm) {
    let c = Complex64::new;
    let rho = DensityMatrix::new(
        ComplexMatrix::new(2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap(),
    )
    .unwrap();

    let plus = ComplexMatrix::new(2, vec![c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)]).unwrap();
    let minus =
        ComplexMatrix::new(2, vec![c(0.5, 0.0), c(-0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0)]).unwrap();
    let x = Povm::new(vec![plus, minus]).unwrap();

    // Projector onto (sqrt(3)|0> + |1>) / 2 and its complement.
    let s = 3.0_f64.sqrt() / 4.0;
    let tilted = ComplexMatrix::new(2, vec![c(0.75, 0.0), c(s, 0.0), c(s, 0.0), c(0.25, 0.0)]).unwrap();
    let complement =
        ComplexMatrix::new(2, vec![c(0.25, 0.0), c(-s, 0.0), c(-s, 0.0), c(0.75, 0.0)]).unwrap();
    let y = Povm::new(vec![tilted, complement]).unwrap();

    (rho, x, y)
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.mat.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let mat = ComplexMatrix::deserialize(deserializer)?;
        DensityMatrix::new(mat).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct PovmRepr {
    elements: Vec<ComplexMatrix>,
    projective: bool,
}

impl Serialize for Povm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PovmRepr {
            elements: self.elements.clone(),
            projective: self.projective,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Povm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        // The stored flag is ignored; validation recomputes it.
        let repr = PovmRepr::deserialize(deserializer)?;
        Povm::new(repr.elements).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pure_state_of_basis_vector() {
        let rho = pure_state(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(rho.matrix().get(0, 0), c(1.0, 0.0));
        assert_eq!(rho.matrix().get(1, 1), c(0.0, 0.0));
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_state_normalizes_amplitudes() {
        let rho = pure_state(&[c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((rho.matrix().get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);

        let rho = pure_state(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((rho.matrix().get(i, j) - c(0.5, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn pure_state_rejects_zero_vector() {
        assert!(matches!(
            pure_state(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap_err(),
            QuantumError::ZeroNorm
        ));
    }

    #[test]
    fn maximally_mixed_has_minimal_purity() {
        let rho = maximally_mixed(2).unwrap();
        assert!((rho.matrix().get(0, 0) - c(0.5, 0.0)).norm() < 1e-15);
        let rho4 = maximally_mixed(4).unwrap();
        assert!((rho4.purity() - 0.25).abs() < 1e-12);
        assert!(matches!(
            maximally_mixed(0).unwrap_err(),
            QuantumError::ZeroDim
        ));
    }

    #[test]
    fn density_matrix_rejects_bad_traces_and_negativity() {
        let double = ComplexMatrix::identity(2);
        assert!(matches!(
            DensityMatrix::new(double).unwrap_err(),
            QuantumError::TraceNotOne { .. }
        ));

        let negative = ComplexMatrix::new(
            2,
            vec![c(1.1, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.1, 0.0)],
        )
        .unwrap();
        assert!(matches!(
            DensityMatrix::new(negative).unwrap_err(),
            QuantumError::NotPsd { .. }
        ));

        let skew = ComplexMatrix::new(2, vec![c(0.5, 0.0), c(0.1, 0.0), c(0.3, 0.0), c(0.5, 0.0)]).unwrap();
        assert!(DensityMatrix::new(skew).is_err());
    }

    #[test]
    fn povm_validation_accepts_computational_basis() {
        let x = Povm::computational(3);
        assert_eq!(x.len(), 3);
        assert!(x.is_projective());
    }

    #[test]
    fn povm_with_zero_element_is_valid_and_projective() {
        let zero = ComplexMatrix::zeros(2);
        let povm = Povm::new(vec![ComplexMatrix::identity(2), zero]).unwrap();
        assert_eq!(povm.len(), 2);
        assert!(povm.is_projective());
    }

    #[test]
    fn trivial_measurement_is_projective() {
        assert!(Povm::trivial(4).is_projective());
    }

    #[test]
    fn povm_rejects_incomplete_elements() {
        let half = ComplexMatrix::identity(2).scale_re(0.5);
        assert!(matches!(
            Povm::new(vec![half]).unwrap_err(),
            QuantumError::Incomplete { .. }
        ));
        assert!(matches!(Povm::new(vec![]).unwrap_err(), QuantumError::EmptyPovm));
    }

    #[test]
    fn povm_rejects_negative_elements() {
        let up = ComplexMatrix::new(2, vec![c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let down = ComplexMatrix::new(
            2,
            vec![c(-0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        assert!(matches!(
            Povm::new(vec![up, down]).unwrap_err(),
            QuantumError::ElementNotPsd { index: 1, .. }
        ));
    }

    #[test]
    fn projective_flag_is_false_for_smeared_measurements() {
        let a = ComplexMatrix::identity(2).scale_re(0.25);
        let b = ComplexMatrix::identity(2).scale_re(0.75);
        let povm = Povm::new(vec![a, b]).unwrap();
        assert!(!povm.is_projective());
    }

    #[test]
    fn example_instance_has_documented_marginal_structure() {
        let (rho, x, y) = nonclassical_qubit_example();
        assert!(x.is_projective());
        assert!(y.is_projective());
        // tr(rho Pi_+) = 1/2 and tr(rho Pi_tilted) = 3/4.
        let px = trace_of_product(rho.matrix(), x.element(0)).re;
        let py = trace_of_product(rho.matrix(), y.element(0)).re;
        assert!((px - 0.5).abs() < 1e-12);
        assert!((py - 0.75).abs() < 1e-12);
        // The tilted projector really is idempotent.
        let sq = y.element(0).matmul(y.element(0)).unwrap();
        assert!(sq.max_abs_diff(y.element(0)) < 1e-12);
        // max overlap between the two bases is (2 + sqrt(3)) / 4.
        let want = (2.0 + 3.0_f64.sqrt()) / 4.0;
        assert!((max_overlap(&x, &y) - want).abs() < 1e-12);
    }

    #[test]
    fn density_matrix_json_round_trip_is_bit_exact() {
        let rho = pure_state(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let text = serde_json::to_string(&rho).unwrap();
        let back: DensityMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(rho.matrix(), back.matrix());
        assert!(text.contains("\"dim\":2"));
    }

    #[test]
    fn povm_json_round_trip_recomputes_projective_flag() {
        let (_, x, _) = nonclassical_qubit_example();
        let mut text = serde_json::to_string(&x).unwrap();
        assert!(text.contains("\"projective\":true"));
        // Tampering with the stored flag does not survive deserialization.
        text = text.replace("\"projective\":true", "\"projective\":false");
        let back: Povm = serde_json::from_str(&text).unwrap();
        assert!(back.is_projective());
        assert_eq!(back.element(0), x.element(0));
    }

    #[test]
    fn density_matrix_json_rejects_invalid_states() {
        let text = r#"{"dim":2,"entries":[[1.0,0.0],[0.0,0.0],[0.0,0.0],[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<DensityMatrix>(text).is_err());
    }
}
