//! Central numeric tolerance configuration.
//!
//! Every validation threshold used by the crate lives in one record so the
//! numeric contract can be audited in a single place and overridden as a unit.
//! The defaults are deliberate: structural checks (hermiticity, traces) sit at
//! 1e-10, derived quantities (sums, bound slacks) at 1e-9, and the Jacobi
//! convergence target well below both so eigensolver error never masquerades
//! as a physics violation.

/// Numeric thresholds shared across validation and bound checking.
#[derive(Debug, Clone)]
pub struct Tolerances {
    /// Max entrywise |A - A^dagger| still accepted as Hermitian.
    pub hermiticity: f64,
    /// Eigenvalues above -psd count as positive semidefinite.
    pub psd: f64,
    /// Accepted |tr(rho) - 1| for density matrices.
    pub unit_trace: f64,
    /// Accepted entrywise deviation of a POVM element sum from the identity.
    pub completeness: f64,
    /// Entrywise deviation allowed in E_i E_j = delta_ij E_i before a POVM
    /// loses its projective flag.
    pub projective: f64,
    /// Accepted |sum(q) - 1| for quasiprobability tables.
    pub unit_sum: f64,
    /// Entry moduli may exceed 1 by at most this much.
    pub entry_modulus: f64,
    /// Bound checks pass at slack >= -slack.
    pub slack: f64,
    /// Default magnitude threshold when counting support.
    pub support_threshold: f64,
    /// An l1 excess above this margin flags nonclassicality.
    pub witness: f64,
    /// Jacobi sweep convergence target for the off-diagonal Frobenius norm.
    pub jacobi_off_norm: f64,
    /// Hard cap on Jacobi sweeps; convergence is accepted either way.
    pub jacobi_max_sweeps: usize,
    /// Floor applied to eigenvalues inside inverse square roots.
    pub eigenvalue_floor: f64,
}

impl Tolerances {
    /// The default thresholds used everywhere unless a caller overrides them.
    pub const fn standard() -> Self {
        Tolerances {
            hermiticity: 1e-10,
            psd: 1e-9,
            unit_trace: 1e-10,
            completeness: 1e-9,
            projective: 1e-9,
            unit_sum: 1e-9,
            entry_modulus: 1e-9,
            slack: 1e-9,
            support_threshold: 1e-9,
            witness: 1e-9,
            jacobi_off_norm: 1e-13,
            jacobi_max_sweeps: 100,
            eigenvalue_floor: 1e-12,
        }
    }

    /// Standard thresholds with the bound-check slack replaced, used for the
    /// caller-facing tolerance override.
    pub fn with_slack(slack: f64) -> Self {
        Tolerances {
            slack,
            ..Self::standard()
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::standard()
    }
}
