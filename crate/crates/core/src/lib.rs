//! Quasiprobability numerics for quantum states and measurements.
//!
//! The crate computes Kirkwood-Dirac quasiprobability distributions from
//! density matrices and POVMs, verifies the catalogue of classical and
//! quasiprobabilistic norm bounds on them, models postquantum tables that
//! satisfy only the weakest constraints, and searches for extremal instances.

pub mod kd;
pub mod linalg;
pub mod postquantum;
pub mod quantum;
pub mod search;
pub mod tolerances;
