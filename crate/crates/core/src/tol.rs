//! Numerical tolerances shared across the crate.
//!
//! All values are absolute and apply to dimensionless quantities of order one.

/// Equality of matrix entries (Hermiticity, unitarity, traces).
pub const TAU_EQ: f64 = 1e-12;
/// Eigen-reconstruction error.
pub const TAU_EIG: f64 = 1e-10;
/// Allowed negativity of an eigenvalue still counted as positive semi-definite.
pub const TAU_PSD: f64 = 1e-10;
/// Allowed negativity / normalization slack of probability vectors.
pub const TAU_PROB: f64 = 1e-10;
/// Maximum fiducial defect accepted when building a SIC system.
pub const TAU_BUILD: f64 = 1e-8;
/// SIC overlap law and projector checks.
pub const TAU_SIC: f64 = 1e-8;
/// Stretched-matrix symmetry checks.
pub const TAU_SYM: f64 = 1e-9;
/// A point is "on" a sphere when its radius is within this distance.
pub const TAU_SPHERE: f64 = 1e-8;
