//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation zeroes one off-diagonal pair through a phased Givens
//! rotation; sweeps repeat until the off-diagonal Frobenius norm drops below
//! the configured target. Quadratic convergence makes a handful of sweeps
//! enough at these dimensions.

use super::{Complex64, ComplexMatrix, LinalgError};
use crate::tolerances::Tolerances;

/// Eigendecomposition of a Hermitian matrix: eigenvalues ascending, matching
/// eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    /// Rebuilds V diag(lambda) V^dagger, mainly for residual checks.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.eigenvalues.len();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(d, |i, j| {
            (0..d)
                .map(|k| v.get(i, k) * self.eigenvalues[k] * v.get(j, k).conj())
                .sum()
        })
    }
}

pub(super) fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEig, LinalgError> {
    let tol = Tolerances::standard();
    let deviation = a.hermiticity_deviation();
    if deviation > tol.hermiticity {
        return Err(LinalgError::NotHermitian { deviation });
    }

    let d = a.dim();
    // Work on the Hermitian part so roundoff asymmetry in the input cannot
    // drift through the sweeps.
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(d);

    for _sweep in 0..tol.jacobi_max_sweeps {
        if off_diagonal_norm(&m) < tol.jacobi_off_norm {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    let diag: Vec<f64> = (0..d).map(|i| m.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(d, |r, c| v.get(r, order[c]));
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Frobenius norm of the off-diagonal part.
fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let d = m.dim();
    let mut acc = 0.0;
    for p in 0..d {
        for q in (p + 1)..d {
            acc += 2.0 * m.get(p, q).norm_sqr();
        }
    }
    acc.sqrt()
}

/// One phased Jacobi rotation zeroing the (p, q) entry, applied symmetrically
/// to `m` and accumulated into the eigenvector columns of `v`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let d = m.dim();
    let apq = m.get(p, q);
    let h = apq.norm();
    if h < 1e-300 {
        return;
    }
    let app = m.get(p, p).re;
    let aqq = m.get(q, q).re;
    let phase = apq / h;

    let tau = (aqq - app) / (2.0 * h);
    // Smaller-angle root of t^2 + 2 tau t - 1 = 0; asymptotic form avoids
    // overflow when the diagonal dominates the pivot.
    let t = if tau.abs() > 1e150 {
        0.5 / tau
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    for k in 0..d {
        if k == p || k == q {
            continue;
        }
        // Row updates; column entries follow by conjugation so the matrix
        // stays exactly Hermitian.
        let apk = m.get(k, p).conj();
        let aqk = m.get(k, q).conj();
        let new_pk = c * apk - s * phase * aqk;
        let new_qk = s * phase.conj() * apk + c * aqk;
        m.set(p, k, new_pk);
        m.set(k, p, new_pk.conj());
        m.set(q, k, new_qk);
        m.set(k, q, new_qk.conj());
    }

    let app_new = c * c * app - 2.0 * c * s * h + s * s * aqq;
    let aqq_new = s * s * app + 2.0 * c * s * h + c * c * aqq;
    m.set(p, p, Complex64::new(app_new, 0.0));
    m.set(q, q, Complex64::new(aqq_new, 0.0));
    m.set(p, q, Complex64::ZERO);
    m.set(q, p, Complex64::ZERO);

    for k in 0..d {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, c * vkp - s * phase.conj() * vkq);
        v.set(k, q, s * phase * vkp + c * vkq);
    }
}
