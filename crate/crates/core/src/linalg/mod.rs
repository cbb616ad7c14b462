//! Dense complex linear algebra on small square matrices.
//!
//! Self-contained kernel for the dimensions this crate cares about (d <= 32):
//! row-major storage, elementwise ops, and a cyclic Jacobi eigensolver for
//! Hermitian matrices. Plain O(d^3) algorithms are the right tool at this
//! size; nothing here allocates more than a handful of d*d buffers.

mod eig;

pub use eig::HermitianEig;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Complex64 = num_complex::Complex<f64>;

/// Errors from matrix construction and linear-algebra operations.
#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension must be at least 1")]
    ZeroDim,
    #[error("matrix of dimension {dim} requires {expected} entries, got {actual}")]
    EntryCount {
        dim: usize,
        expected: usize,
        actual: usize,
    },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not Hermitian: max |A - A^dagger| entry is {deviation:.3e}")]
    NotHermitian { deviation: f64 },
}

/// Square complex matrix with row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Validating constructor: checks the entry count and rejects NaN/Inf.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self, LinalgError> {
        if dim == 0 {
            return Err(LinalgError::ZeroDim);
        }
        if entries.len() != dim * dim {
            return Err(LinalgError::EntryCount {
                dim,
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        for (k, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(LinalgError::NonFinite {
                    row: k / dim,
                    col: k % dim,
                });
            }
        }
        Ok(ComplexMatrix { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        ComplexMatrix {
            dim,
            entries: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::ONE;
        }
        m
    }

    /// Builds a matrix entry by entry; computed entries must stay finite.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let z = f(i, j);
                assert!(
                    z.re.is_finite() && z.im.is_finite(),
                    "non-finite entry at ({i}, {j})"
                );
                entries.push(z);
            }
        }
        ComplexMatrix { dim, entries }
    }

    /// Rank-one matrix |v><v|.
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        assert!(
            value.re.is_finite() && value.im.is_finite(),
            "non-finite entry at ({row}, {col})"
        );
        self.entries[row * self.dim + col] = value;
    }

    pub fn conjugate_transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    /// Matrix product; the only fallible arithmetic op (dimensions may differ).
    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let d = self.dim;
        let mut out = vec![Complex64::ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let aik = self.entries[i * d + k];
                if aik == Complex64::ZERO {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] += aik * other.entries[k * d + j];
                }
            }
        }
        Ok(ComplexMatrix { dim: d, entries: out })
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    /// Sum of two same-dimension matrices. Dimension mismatch is a caller bug.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in add");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        ComplexMatrix {
            dim: self.dim,
            entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in sub");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        ComplexMatrix {
            dim: self.dim,
            entries,
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Hermitian part (A + A^dagger) / 2.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }

    /// Largest entrywise |A - B|.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in max_abs_diff");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise |A - A^dagger|; zero for exactly Hermitian input.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.
    /// Eigenvalues come back ascending with matching eigenvector columns.
    pub fn hermitian_eig(&self) -> Result<HermitianEig, LinalgError> {
        eig::hermitian_eig(self)
    }

    /// Positive semidefiniteness via the smallest eigenvalue; non-Hermitian
    /// input is an error rather than a `false`.
    pub fn is_psd(&self, tol: f64) -> Result<bool, LinalgError> {
        let eig = self.hermitian_eig()?;
        Ok(eig.eigenvalues[0] >= -tol)
    }
}

/// tr(A B) without materializing the product.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    assert_eq!(a.dim(), b.dim(), "dimension mismatch in trace_of_product");
    let d = a.dim();
    let mut acc = Complex64::ZERO;
    for i in 0..d {
        for k in 0..d {
            acc += a.entries[i * d + k] * b.entries[k * d + i];
        }
    }
    acc
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            dim: self.dim,
            entries: self.entries.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        let entries = repr
            .entries
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(repr.dim, entries).map_err(D::Error::custom)
    }
}
