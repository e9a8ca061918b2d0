//! Exact-arithmetic topology of complete finitely branched minimal
//! surfaces: end/spinning bookkeeping, Euler characteristics, the total
//! curvature balance, parity constraints, and index lower bounds.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum ProfileError {
    #[error("a profile needs at least one end")]
    NoEnds,
    #[error("end multiplicities must be at least 1, got {0}")]
    BadEndMultiplicity(u32),
    #[error("branch orders must be at least 1, got {0}")]
    BadBranchOrder(u32),
    #[error("k = {k} exceeds the index {index}")]
    KAboveIndex { index: u32, k: u32 },
    #[error("k must be at least 1")]
    KZero,
}

/// Declared topology of a complete, finitely branched minimal surface
/// with finite total curvature. For non-orientable surfaces `genus` is
/// the genus of the oriented double cover; the surface's own Euler
/// characteristic is then 1 - genus - e (half the cover's 2 - 2g - 2e).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyProfile {
    pub orientable: bool,
    pub genus: u32,
    /// Spinning multiplicity d_j >= 1 of each end.
    pub ends: Vec<u32>,
    pub branch_orders: Vec<u32>,
}

impl TopologyProfile {
    pub fn new(
        orientable: bool,
        genus: u32,
        ends: Vec<u32>,
        branch_orders: Vec<u32>,
    ) -> Result<Self, ProfileError> {
        let p = TopologyProfile { orientable, genus, ends, branch_orders };
        p.validate()?;
        Ok(p)
    }

    /// Structural validity. Parity is a theorem about honest profiles,
    /// not a structural constraint, and is checked separately so that
    /// counterexample profiles remain representable.
    pub fn validate(&self) -> Result<(), ProfileError> {
        if self.ends.is_empty() {
            return Err(ProfileError::NoEnds);
        }
        if let Some(&d) = self.ends.iter().find(|&&d| d == 0) {
            return Err(ProfileError::BadEndMultiplicity(d));
        }
        if let Some(&b) = self.branch_orders.iter().find(|&&b| b == 0) {
            return Err(ProfileError::BadBranchOrder(b));
        }
        Ok(())
    }

    pub fn end_count(&self) -> u32 {
        self.ends.len() as u32
    }

    /// Total spinning S.
    pub fn spinning(&self) -> u32 {
        self.ends.iter().sum()
    }

    /// Total branching order B.
    pub fn total_branching(&self) -> u32 {
        self.branch_orders.iter().sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        let g = self.genus as i64;
        let e = self.end_count() as i64;
        if self.orientable {
            2 - 2 * g - e
        } else {
            1 - g - e
        }
    }

    /// Euler characteristic after filling each end with a point.
    pub fn compactified_euler(&self) -> i64 {
        self.euler_characteristic() + self.end_count() as i64
    }

    /// S - B == e (mod 2).
    pub fn parity_ok(&self) -> bool {
        let s = self.spinning() as i64;
        let b = self.total_branching() as i64;
        let e = self.end_count() as i64;
        (s - b - e).rem_euclid(2) == 0
    }

    pub fn plane() -> Self {
        TopologyProfile { orientable: true, genus: 0, ends: vec![1], branch_orders: vec![] }
    }

    pub fn catenoid() -> Self {
        TopologyProfile { orientable: true, genus: 0, ends: vec![1, 1], branch_orders: vec![] }
    }

    pub fn enneper() -> Self {
        TopologyProfile { orientable: true, genus: 0, ends: vec![3], branch_orders: vec![] }
    }

    /// One-ended spinning-3 non-orientable profile.
    pub fn henneberg_like() -> Self {
        TopologyProfile { orientable: false, genus: 0, ends: vec![3], branch_orders: vec![2] }
    }

    /// Non-orientable quotient of the 4-punctured sphere: two ends,
    /// oriented cover of genus 0. Its ends are cylinder-type, so it pairs
    /// with `flat_quotient_residual`, not the spinning formula.
    pub fn scherk_quotient() -> Self {
        TopologyProfile { orientable: false, genus: 0, ends: vec![1, 1], branch_orders: vec![] }
    }
}

/// Balance (1/2pi) * measured + S - B - chi. Zero for exact totals of
/// surfaces with planar- or catenoid-type ends in flat 3-space.
pub fn jorge_meeks_residual(profile: &TopologyProfile, measured_total_curvature: f64) -> f64 {
    let s = profile.spinning() as f64;
    let b = profile.total_branching() as f64;
    let chi = profile.euler_characteristic() as f64;
    measured_total_curvature / (2.0 * PI) + s - b - chi
}

/// Balance measured/(2pi) - chi for surfaces in flat quotient ambients
/// whose ends are asymptotically flat cylinders. Such ends carry no
/// spinning correction, so the end-spinning formula does not apply.
pub fn flat_quotient_residual(profile: &TopologyProfile, measured_total_curvature: f64) -> f64 {
    measured_total_curvature / (2.0 * PI) - profile.euler_characteristic() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuredDegree {
    pub rounded: i64,
    /// Distance of measured/(2pi) from the nearest integer.
    pub offset: f64,
    pub near_integer: bool,
    pub matches_compactified_parity: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityReport {
    pub combinatorial: bool,
    pub measured: Option<MeasuredDegree>,
}

impl ParityReport {
    pub fn pass(&self) -> bool {
        self.combinatorial
            && self
                .measured
                .as_ref()
                .map(|m| !m.near_integer || m.matches_compactified_parity)
                .unwrap_or(true)
    }
}

/// Combinatorial parity S - B == e (mod 2), plus the degree parity of a
/// measured total curvature when one is supplied. A measured total that
/// fails to round to an integer multiple of 2pi within 0.05 is flagged
/// through `near_integer` rather than treated as fatal.
pub fn parity_check(profile: &TopologyProfile, measured_total_curvature: Option<f64>) -> ParityReport {
    let measured = measured_total_curvature.map(|t| {
        let deg = t / (2.0 * PI);
        let rounded = deg.round() as i64;
        let offset = (deg - deg.round()).abs();
        MeasuredDegree {
            rounded,
            offset,
            near_integer: offset <= 0.05,
            matches_compactified_parity: (rounded - profile.compactified_euler()).rem_euclid(2) == 0,
        }
    });
    ParityReport { combinatorial: profile.parity_ok(), measured }
}

fn ceil_div_3(x: i64) -> i64 {
    // ceiling of x/3 for possibly negative x
    x.div_euclid(3) + if x.rem_euclid(3) == 0 { 0 } else { 1 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexBound {
    /// From 3I >= -chi + 2S + e - 2B - 3.
    pub unified: u32,
    /// From the orientability-specific display:
    /// orientable 3I >= 2g + 2 sum(d_j + 1) - 2B - 5,
    /// non-orientable 3I >= g + 2 sum(d_j + 1) - 2B - 4 (cover genus g).
    pub split: u32,
}

impl IndexBound {
    pub fn bound(&self) -> u32 {
        self.unified.max(self.split)
    }
}

pub fn cm_index_lower_bound(profile: &TopologyProfile) -> IndexBound {
    let chi = profile.euler_characteristic();
    let s = profile.spinning() as i64;
    let e = profile.end_count() as i64;
    let b = profile.total_branching() as i64;
    let g = profile.genus as i64;

    let unified_rhs = -chi + 2 * s + e - 2 * b - 3;
    let split_rhs = if profile.orientable {
        2 * g + 2 * (s + e) - 2 * b - 5
    } else {
        g + 2 * (s + e) - 2 * b - 4
    };
    IndexBound {
        unified: ceil_div_3(unified_rhs).max(0) as u32,
        split: ceil_div_3(split_rhs).max(0) as u32,
    }
}

/// Optional strengthening available only when the index is known to be
/// even: the right-hand side gains 1. Never applied silently.
pub fn cm_index_lower_bound_even(profile: &TopologyProfile) -> IndexBound {
    let base = cm_index_lower_bound(profile);
    let chi = profile.euler_characteristic();
    let s = profile.spinning() as i64;
    let e = profile.end_count() as i64;
    let b = profile.total_branching() as i64;
    let unified_rhs = -chi + 2 * s + e - 2 * b - 3 + 1;
    IndexBound {
        unified: ceil_div_3(unified_rhs).max(0) as u32,
        split: base.split,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityCheck {
    pub violations: Vec<String>,
    /// Index floor forced on non-orientable surfaces whose branch set
    /// maps to at most one point.
    pub implied_index_floor: Option<u32>,
}

/// Structural consequences of stability: a stable complete example must
/// be non-orientable and its branch locus must map onto more than one
/// point. `branch_image_points` is the number of distinct image points
/// of the branch set, when known.
pub fn stability_rules_check(
    profile: &TopologyProfile,
    stable: bool,
    branch_image_points: Option<u32>,
) -> StabilityCheck {
    let mut violations = Vec::new();
    if stable && profile.orientable {
        violations.push("stable profiles must be non-orientable".to_string());
    }
    if stable {
        if let Some(n) = branch_image_points {
            if n <= 1 {
                violations.push(format!(
                    "stable profiles need branch images at more than one point, got {n}"
                ));
            }
        }
    }
    let implied_index_floor = match (profile.orientable, branch_image_points) {
        (false, Some(n)) if n <= 1 => Some(2),
        _ => None,
    };
    StabilityCheck { violations, implied_index_floor }
}

/// Sum(d_j + 1) >= 4, the spinning floor for non-flat complete limits.
/// False identifies the flat profile, which sits outside the floor's
/// hypotheses.
pub fn spinning_ends_floor(profile: &TopologyProfile) -> bool {
    profile.spinning() + profile.end_count() >= 4
}

/// g(Sigma) <= g(ambient complement) + g(removed piece) + boundary curves
/// of the piece - components of the piece.
pub fn genus_subsurface_check(
    g_sigma: u32,
    g_delta: u32,
    g_complement: u32,
    n_boundary_delta: u32,
    n_components_delta: u32,
) -> bool {
    assert!(n_components_delta >= 1);
    g_sigma as i64
        <= g_complement as i64 + g_delta as i64 + n_boundary_delta as i64 - n_components_delta as i64
}

/// Bound 3I - 2k on the genus drop across k concentration pieces of
/// total index I.
pub fn genus_drop_bound(index: u32, k: u32) -> Result<u32, ProfileError> {
    if k == 0 {
        return Err(ProfileError::KZero);
    }
    if k > index {
        return Err(ProfileError::KAboveIndex { index, k });
    }
    Ok(3 * index - 2 * k)
}
