//! Numerical tolerances shared by the library, the sweeps and the test suites.
//!
//! Every threshold used to decide a verdict lives here so that the CLI, the
//! unit tests and the acceptance suite cannot drift apart.

/// An eigenvalue (or principal minor) at or above `-FEASIBILITY` counts as
/// non-negative.
pub const FEASIBILITY: f64 = 1e-12;

/// A minimum eigenvalue within this distance of zero marks the covariance
/// as singular.
pub const SINGULAR: f64 = 1e-12;

/// Allowed excess of a measured gap over the claimed constant gap.
pub const GAP_CERTIFICATE: f64 = 1e-9;

/// A row whose gap is below `-NEGATIVE_GAP` has inner > outer.
pub const NEGATIVE_GAP: f64 = 1e-12;

/// Exact algebraic identities between closed forms (middle-branch gaps).
pub const IDENTITY: f64 = 1e-12;

/// Two branches meeting at a boundary count as continuous below this.
pub const CONTINUITY: f64 = 1e-9;

/// Jumps above this at a branch boundary are reported as discontinuities.
pub const JUMP_REPORT: f64 = 1e-6;

/// Increase between adjacent c-values that counts as a monotonicity violation.
pub const MONOTONE: f64 = 1e-9;

/// Optimizer agreement (power split vs grid search), in bpcu.
pub const OPTIMIZER: f64 = 1e-6;

/// Closed-form Schur complement vs dense oracle.
pub const SCHUR: f64 = 1e-9;

/// Relative pivot size below which an empirical covariance is treated as
/// numerically singular.
pub const DEGENERATE_PIVOT: f64 = 1e-12;
