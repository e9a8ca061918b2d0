//! Measures how closely an annular mesh resembles a flat multi-sheeted
//! graph over a plane: per-band normal spread, slice lengths against whole
//! circles, band areas against flat annuli, sheet count by winding, and
//! boundary turning against full turns. A separate report covers compact
//! pieces where curvature concentrates.
//!
//! All radii are extrinsic distances to the origin. Spheres are sliced by
//! linear interpolation of |x| along mesh edges, and band areas clip each
//! triangle against the same linearized radius, so a mesh whose rows sit
//! exactly on the requested radii is measured without clipping error.

mod check;
mod pieces;
mod slice;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use check::{check_conclusions, check_hypotheses, full_check, multiplicity};
pub use pieces::delta_piece_report;
pub use slice::boundary_geodesic_curvature;

/// Default slope budget accepted by the checks. Residual tolerances and the
/// turning window are multiples of this.
pub const DEFAULT_TAU: f64 = std::f64::consts::PI / 10.0;

#[derive(Debug, Error)]
pub enum MultigraphError {
    #[error("radii must satisfy 0 < r1 <= r2/2, got [{r1}, {r2}]")]
    InvalidRadii { r1: f64, r2: f64 },
    #[error("mesh radii [{found_min:.6}, {found_max:.6}] do not span the requested [{r1}, {r2}]")]
    MeshDoesNotSpan {
        r1: f64,
        r2: f64,
        found_min: f64,
        found_max: f64,
    },
    #[error("no vertices with radius in the band [{lo}, {hi}]")]
    EmptyBand { lo: f64, hi: f64 },
    #[error("no mesh edge crosses radius {radius}")]
    EmptySlice { radius: f64 },
    #[error("slice projection passes within {closest:.3e} of the origin")]
    ProjectionHitsOrigin { closest: f64 },
    #[error("slice winds {m} times, above the cap {cap:.3} implied by l0 = {l0}")]
    MultiplicityAboveCap { m: u32, cap: f64, l0: f64 },
    #[error("boundary slice does not wind around the projection origin")]
    DegenerateWinding,
    #[error("{0}")]
    InvalidParameter(String),
    #[error("mesh is inconsistent: {0}")]
    BadMesh(String),
}

/// Names of the entries in [`AnnulusCheck::residuals`] and
/// [`AnnulusCheck::passed`].
pub mod residual_keys {
    /// Worst angle, over each band, between the surface and the sphere
    /// through the point. Zero when every crossing is orthogonal.
    pub const ANGLE_DEFICIT: &str = "B1_angle_deficit";
    /// Largest angular radius of the normal image of a band around the
    /// band's reference normal.
    pub const GAUSS_SPREAD: &str = "B2_gauss_spread";
    /// Length of the slice at the inner radius divided by that radius.
    pub const LENGTH_RATIO: &str = "B3_length_ratio";
    /// |slice length - 2 pi m R| / R at the outer radius.
    pub const LENGTH_RESIDUAL: &str = "C1_length_residual";
    /// Intrinsic distance between the two sphere slices divided by the
    /// difference of the radii.
    pub const DISTANCE_RATIO: &str = "C2_distance_ratio";
    /// |band area - pi m (R^2 - R1^2)| / (R^2 - R1^2).
    pub const AREA_RESIDUAL: &str = "C3_area_residual";
    /// |total turning of the outer slice - 2 pi m|.
    pub const TURNING_DEVIATION: &str = "kappa_deviation";
    /// Largest height-to-radius ratio plus slope over the reference plane.
    pub const GRAPH_BOUND: &str = "graph_bound";
}

/// Residual tolerance for the slice-length and band-area checks, given the
/// measured normal spread `alpha`. Monotone in `alpha` and capped by the
/// slope budget `tau`, so tightening the spread never loosens a check.
pub fn residual_tolerance(alpha: f64, tau: f64) -> f64 {
    tau.min(8.0 * alpha)
}

/// Outcome of the annulus checks. `check_hypotheses` fills the `B` entries,
/// `check_conclusions` the `C` entries plus the turning deviation and the
/// graph bound; `full_check` merges both and re-grades the length and area
/// residuals against [`residual_tolerance`]. Parameters a stage was not
/// given stay `None` and are omitted from the serialized form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusCheck {
    #[serde(rename = "R1")]
    pub r1: f64,
    #[serde(rename = "R2")]
    pub r2: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    #[serde(rename = "L0", skip_serializing_if = "Option::is_none", default)]
    pub l0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tau: Option<f64>,
    /// Reference normal of each dyadic band, inner band first.
    pub plane_normal: Vec<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub multiplicity: Option<u32>,
    pub residuals: BTreeMap<String, f64>,
    pub passed: BTreeMap<String, bool>,
}

impl AnnulusCheck {
    pub fn all_passed(&self) -> bool {
        self.passed.values().all(|&ok| ok)
    }
}

pub(crate) fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn normalize(a: [f64; 3]) -> Option<[f64; 3]> {
    let n = norm(a);
    if n < 1e-14 {
        return None;
    }
    Some(scale(a, 1.0 / n))
}

pub(crate) fn lerp(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
    add(a, scale(sub(b, a), t))
}

/// Two unit vectors spanning the plane orthogonal to `v`.
pub(crate) fn plane_basis(v: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    // Pick the coordinate axis least aligned with v to seed the basis.
    let seed = if v[0].abs() <= v[1].abs() && v[0].abs() <= v[2].abs() {
        [1.0, 0.0, 0.0]
    } else if v[1].abs() <= v[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let e1 = normalize(sub(seed, scale(v, dot(seed, v)))).expect("seed is not parallel to v");
    let e2 = cross(v, e1);
    (e1, e2)
}
