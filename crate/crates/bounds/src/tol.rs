//! Pinned numeric tolerances. Every comparison tolerance used by this
//! crate's checks lives here so the values are auditable in one place.

/// Residual allowed in exact algebraic identities (a(i0) vs c_hat/2).
pub const IDENTITY: f64 = 1e-12;

/// Probe offset for the continuity cross-check of the monotonicity
/// radius across a = 0.
pub const CONTINUITY_PROBE: f64 = 1e-8;

/// Residual allowed for that continuity cross-check.
pub const CONTINUITY: f64 = 1e-6;

/// Switch point (in u = sqrt(a)*t) below which f_a uses its series branch.
pub const FA_SERIES_SWITCH: f64 = 1e-4;
