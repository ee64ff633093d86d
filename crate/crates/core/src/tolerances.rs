//! Numerical thresholds shared across modules.

/// Clifford relations, projector algebra.
pub const EXACT: f64 = 1e-12;
/// Relative tolerance for spectral checks on exact-matrix inputs.
pub const SPECTRAL: f64 = 1e-9;
/// Singular values below this fraction of the largest count as zero.
pub const KERNEL_RELATIVE: f64 = 1e-8;
/// Absolute floor for the kernel threshold (an all-zero system has full kernel).
pub const KERNEL_ABSOLUTE: f64 = 1e-12;
/// Skew-symmetry of h.
pub const FLOW: f64 = 1e-9;
/// Jacobi identity for homogeneous structure constants.
pub const JACOBI: f64 = 1e-12;
/// Residual budget on homogeneous models.
pub const HOMOGENEOUS: f64 = 1e-9;
/// Residual budget on chart models (finite differences).
pub const CHART: f64 = 1e-5;
/// Central difference step along frame fields.
pub const FD_STEP: f64 = 1e-4;
/// Congruence test for phase conditions.
pub const CONGRUENCE: f64 = 1e-9;
