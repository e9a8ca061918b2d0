//! Closed-form constants and scalar bounds for finite-index surface
//! estimates: chord-arc factors, area monotonicity radii, curvature
//! thresholds for stable regions, and intrinsic ball area floors.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub mod report;
pub mod tol;

pub use report::{BoundsReport, CrossCheck};

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum BoundsError {
    #[error("curvature constant {got} is below the admissible floor 2*pi")]
    CurvatureConstantTooSmall { got: f64 },
    #[error("radius {r} outside the validity range (0, {limit}]")]
    RadiusOutsideValidity { r: f64, limit: Value },
    #[error("angle {theta} outside (0, pi/2]")]
    AngleOutOfRange { theta: f64 },
    #[error("{0}")]
    BadInput(String),
}

/// Scalar that is either finite or an exact infinite sentinel.
/// Kept symbolic so min-compositions and serialized output never
/// round-trip through `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Finite(f64),
    Infinite,
}

impl Value {
    pub fn finite(self) -> Option<f64> {
        match self {
            Value::Finite(x) => Some(x),
            Value::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Value::Infinite)
    }

    pub fn min(self, other: Value) -> Value {
        match (self, other) {
            (Value::Finite(a), Value::Finite(b)) => Value::Finite(a.min(b)),
            (Value::Finite(a), Value::Infinite) => Value::Finite(a),
            (Value::Infinite, v) => v,
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        if x.is_infinite() && x > 0.0 {
            Value::Infinite
        } else {
            Value::Finite(x)
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Finite(x) => write!(f, "{x}"),
            Value::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Finite(x) => s.serialize_f64(*x),
            Value::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Value;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number or the string \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, x: f64) -> Result<Value, E> {
                Ok(Value::Finite(x))
            }
            fn visit_i64<E: de::Error>(self, x: i64) -> Result<Value, E> {
                Ok(Value::Finite(x as f64))
            }
            fn visit_u64<E: de::Error>(self, x: u64) -> Result<Value, E> {
                Ok(Value::Finite(x as f64))
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Value, E> {
                if s == "inf" {
                    Ok(Value::Infinite)
                } else {
                    Err(E::custom("expected \"inf\""))
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// Intrinsic-to-extrinsic distance factors for a complete branched minimal
/// surface with index at most `index` and total branching order at most
/// `branch`: points of the radius-R extrinsic component sit within
/// `l_hat * R` of its boundary, and any two of them within `c_hat * R`
/// of each other (measured inside the radius-2R component).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChordArc {
    pub l_hat: f64,
    pub c_hat: f64,
}

pub fn chord_arc(index: u32, branch: u32) -> ChordArc {
    let l = ((3.0 * index as f64 + 2.0 * branch as f64 + 3.0) / 2.0).sqrt();
    ChordArc {
        l_hat: l,
        c_hat: 8.0 * l.powi(3) + 2.0 * PI * l * l - 20.0 * l - FRAC_PI_2,
    }
}

/// Pullback-metric distance constant; equal to `chord_arc(i0 + 1, 0).c_hat / 2`
/// by an exact algebraic identity, but evaluated through its own closed form.
pub fn a_of_i0(i0: u32) -> f64 {
    let k = i0 as f64;
    6f64.sqrt() * (3.0 * k + 1.0) * (k + 2.0).sqrt() + (PI / 4.0) * (6.0 * k + 11.0)
}

fn arccot(x: f64) -> f64 {
    // range (0, pi/2] for x >= 0
    FRAC_PI_2 - x.atan()
}

fn arccoth(x: f64) -> f64 {
    // real only for |x| > 1
    0.5 * ((x + 1.0) / (x - 1.0)).ln()
}

/// Largest radius on which the intrinsic area comparison is monotone,
/// for ambient sectional curvature at most `a` and mean curvature at
/// most `h0`. The sub-unit branch of the a < 0 case has no finite
/// stopping radius; arccoth only applies past 1.
pub fn monotonicity_radius(a: f64, h0: f64) -> Value {
    assert!(h0 >= 0.0, "mean curvature bound must be nonnegative");
    if a > 0.0 {
        let s = a.sqrt();
        Value::Finite(arccot(h0 / s) / s)
    } else if a == 0.0 {
        if h0 == 0.0 {
            Value::Infinite
        } else {
            Value::Finite(1.0 / h0)
        }
    } else {
        let s = (-a).sqrt();
        if h0 <= s {
            Value::Infinite
        } else {
            Value::Finite(arccoth(h0 / s) / s)
        }
    }
}

/// (1 - t*sqrt(a)*cot(sqrt(a)*t)) / t^2 on [0, pi/sqrt(a)), for a > 0.
/// Series branch near zero avoids cancellation; the removable limit is a/3.
pub fn f_a(a: f64, t: f64) -> f64 {
    assert!(a > 0.0, "f_a is only defined for positive curvature bounds");
    assert!(t >= 0.0);
    let u = a.sqrt() * t;
    assert!(u < PI, "t outside [0, pi/sqrt(a))");
    if u < tol::FA_SERIES_SWITCH {
        // 1 - u cot u = u^2/3 + u^4/45 + 2 u^6/945 + O(u^8)
        a * (1.0 / 3.0 + u * u / 45.0 + 2.0 * u.powi(4) / 945.0)
    } else {
        (1.0 - u * (u.cos() / u.sin())) / (t * t)
    }
}

/// Euclidean volume of the unit n-ball.
pub fn unit_ball_volume(n: u32) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Lower bound for the n-volume of an intrinsic ball of radius `r` in a
/// submanifold with mean curvature at most `h0` of an ambient space with
/// sectional curvature at most `a` and injectivity radius at least
/// `inj_cap` (None for no cap). Valid for r up to
/// min(inj_cap, monotonicity radius).
pub fn area_lower_bound(
    r: f64,
    n: u32,
    a: f64,
    h0: f64,
    inj_cap: Option<f64>,
) -> Result<f64, BoundsError> {
    if !(r > 0.0) {
        return Err(BoundsError::BadInput(format!("radius {r} must be positive")));
    }
    if n == 0 {
        return Err(BoundsError::BadInput("dimension must be at least 1".into()));
    }
    let r1 = match inj_cap {
        Some(c) if c > 0.0 => monotonicity_radius(a, h0).min(Value::Finite(c)),
        Some(c) => return Err(BoundsError::BadInput(format!("injectivity cap {c} must be positive"))),
        None => monotonicity_radius(a, h0),
    };
    if let Value::Finite(limit) = r1 {
        if r > limit {
            return Err(BoundsError::RadiusOutsideValidity { r, limit: r1 });
        }
    }
    let nn = n as f64;
    let base = unit_ball_volume(n) * r.powi(n as i32);
    if a <= 0.0 {
        Ok(base * (-nn * h0 * r).exp())
    } else {
        // a > 0 forces the monotonicity radius below pi/(2 sqrt a), so r1 is finite
        let t1 = r1.finite().expect("positive curvature bound gives a finite radius");
        Ok(base * (-nn * r * (h0 + 0.5 * f_a(a, t1) * r)).exp())
    }
}

/// Curvature threshold on stable regions: 1 + max(a0, 2 c_s / min(eps, pi/sqrt(k0))).
/// The constant c_s is meaningful only at or above 2*pi and is rejected below it.
pub fn stable_curvature_threshold(
    eps: f64,
    a0: f64,
    c_s: f64,
    k0: f64,
) -> Result<f64, BoundsError> {
    if !(eps > 0.0) {
        return Err(BoundsError::BadInput(format!("eps {eps} must be positive")));
    }
    if k0 < 0.0 {
        return Err(BoundsError::BadInput(format!("k0 {k0} must be nonnegative")));
    }
    if c_s < 2.0 * PI {
        return Err(BoundsError::CurvatureConstantTooSmall { got: c_s });
    }
    let cap = if k0 == 0.0 {
        Value::Infinite
    } else {
        Value::Finite(PI / k0.sqrt())
    };
    let denom = Value::Finite(eps).min(cap).finite().expect("eps is finite");
    Ok(1.0 + a0.max(2.0 * c_s / denom))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YauConstants {
    pub c_a: f64,
    pub c0: f64,
}

/// Area-ratio constants assembled from the inner-scale eps0 and the
/// quadratic-floor radius r2 (r2 is always caller-supplied, it has no
/// closed form).
pub fn yau_area_constants(eps0: f64, r2: f64) -> YauConstants {
    assert!(eps0 > 0.0 && r2 > 0.0);
    let c_a = eps0.min(r2 * r2 / eps0);
    YauConstants {
        c_a,
        c0: (c_a * eps0).min(c_a),
    }
}

pub fn combined_constant(c0: f64, c1: f64) -> f64 {
    c0.min(c1)
}

/// Quadratic floor check for a measured intrinsic ball area.
/// Only applicable while r stays below both r2 and the distance to the
/// mesh boundary; outside that range the check is vacuous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallAreaCheck {
    pub applicable: bool,
    pub floor: f64,
    pub pass: bool,
}

pub fn ball_area_check(area: f64, r: f64, r2: f64, boundary_dist: f64) -> BallAreaCheck {
    let applicable = r > 0.0 && r <= r2.min(boundary_dist);
    let floor = 3.0 * r * r;
    BallAreaCheck {
        applicable,
        floor,
        pass: !applicable || area >= floor,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalProduct {
    pub value: f64,
    /// True at theta = pi/2, the only angle whose product is pinned by a
    /// closed-form reference value (2*pi). Other angles report the same
    /// formula without a reference.
    pub at_extremal_angle: bool,
}

/// Product of the vertex curvature norm 4*sqrt(2) with the ambient
/// injectivity radius pi/(4 cos(theta/2)) for the doubly periodic
/// quotient family.
pub fn scherk_extremal(theta: f64) -> Result<ExtremalProduct, BoundsError> {
    if !(theta > 0.0 && theta <= FRAC_PI_2 * (1.0 + 1e-14)) {
        return Err(BoundsError::AngleOutOfRange { theta });
    }
    let value = 4.0 * 2f64.sqrt() * PI / (4.0 * (theta / 2.0).cos());
    Ok(ExtremalProduct {
        value,
        at_extremal_angle: (theta - FRAC_PI_2).abs() <= 1e-12,
    })
}

/// Helicoid analogue of the extremal product: sqrt(2) * pi/2 = pi/sqrt(2).
pub fn helicoid_extremal() -> f64 {
    2f64.sqrt() * FRAC_PI_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arccot_inverts_cot() {
        for &x in &[0.1, 0.5, 1.0, 3.0, 20.0] {
            let t = arccot(x);
            assert!((t.cos() / t.sin() - x).abs() < 1e-12);
        }
        assert!((arccot(0.0) - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn arccoth_inverts_coth() {
        for &t in &[0.2f64, 1.0, 2.5] {
            let c = t.cosh() / t.sinh();
            assert!((arccoth(c) - t).abs() < 1e-10);
        }
    }

    #[test]
    fn unit_ball_volumes() {
        assert_eq!(unit_ball_volume(1), 2.0);
        assert_eq!(unit_ball_volume(2), PI);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn f_a_series_coefficients_match_direct_form() {
        // above the switch f_a takes the direct branch; the series
        // polynomial must agree with it there (below the switch the
        // direct form loses its digits to cancellation, which is the
        // reason the series branch exists)
        let a = 2.0f64;
        let s = a.sqrt();
        for &u in &[2e-4f64, 1e-3, 1e-2] {
            let t = u / s;
            let series = a * (1.0 / 3.0 + u * u / 45.0 + 2.0 * u.powi(4) / 945.0);
            assert!(
                (f_a(a, t) - series).abs() <= 1e-7 * series.abs(),
                "u = {u}"
            );
        }
    }

    #[test]
    fn f_a_limit_is_a_thirds() {
        for &a in &[0.5, 1.0, 7.0] {
            assert!((f_a(a, 1e-9) - a / 3.0).abs() < 1e-8);
        }
    }

    #[test]
    fn value_min_and_serde() {
        let f = Value::Finite(2.0);
        assert_eq!(f.min(Value::Infinite), f);
        assert_eq!(Value::Infinite.min(Value::Infinite), Value::Infinite);
        assert_eq!(Value::Infinite.min(f), f);
        assert_eq!(serde_json::to_string(&f).unwrap(), "2.0");
        assert_eq!(serde_json::to_string(&Value::Infinite).unwrap(), "\"inf\"");
        let back: Value = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(back, Value::Infinite);
        let back: Value = serde_json::from_str("2.5").unwrap();
        assert_eq!(back, Value::Finite(2.5));
    }

    #[test]
    fn monotonicity_radius_rejects_subunit_arccoth_argument() {
        // at a = -1 the arccoth formula only applies for h0 > 1
        assert_eq!(monotonicity_radius(-1.0, 0.5), Value::Infinite);
        assert_eq!(monotonicity_radius(-1.0, 1.0), Value::Infinite);
        let r = monotonicity_radius(-1.0, 2.0).finite().unwrap();
        assert!((r - arccoth(2.0)).abs() < 1e-15);
    }

    #[test]
    fn area_bound_positive_curvature_stays_below_flat() {
        let flat = area_lower_bound(0.5, 2, 0.0, 0.0, None).unwrap();
        let curved = area_lower_bound(0.5, 2, 1.0, 0.0, None).unwrap();
        assert!(curved < flat);
        assert!(curved > 0.0);
    }

    #[test]
    fn area_bound_validity_errors() {
        // r0(0, 1) = 1, so r = 1.5 is outside
        assert!(matches!(
            area_lower_bound(1.5, 2, 0.0, 1.0, None),
            Err(BoundsError::RadiusOutsideValidity { .. })
        ));
        // cap tighter than r0
        assert!(area_lower_bound(0.8, 2, 0.0, 1.0, Some(0.5)).is_err());
        assert!(area_lower_bound(0.4, 2, 0.0, 1.0, Some(0.5)).is_ok());
    }

    #[test]
    fn threshold_rejects_small_cs() {
        assert!(matches!(
            stable_curvature_threshold(1.0, 0.0, 6.0, 0.0),
            Err(BoundsError::CurvatureConstantTooSmall { .. })
        ));
    }

    #[test]
    fn threshold_branches() {
        let cs = 2.0 * PI;
        // large eps, dominant a0
        let v = stable_curvature_threshold(1e9, 100.0, cs, 0.0).unwrap();
        assert_eq!(v, 101.0);
        // k0 cap active: min(eps, pi/sqrt(k0)) = pi at k0 = 1, eps = 10
        let v = stable_curvature_threshold(10.0, 0.0, cs, 1.0).unwrap();
        assert!((v - (1.0 + 2.0 * cs / PI)).abs() < 1e-12);
    }

    #[test]
    fn ball_check_vacuous_outside_validity() {
        let c = ball_area_check(0.1, 2.0, 1.0, 5.0);
        assert!(!c.applicable && c.pass);
        let c = ball_area_check(3.0, 1.0, 2.0, 2.0);
        assert!(c.applicable && c.pass);
        let c = ball_area_check(2.9, 1.0, 2.0, 2.0);
        assert!(c.applicable && !c.pass);
    }

    #[test]
    fn scherk_angle_domain() {
        assert!(scherk_extremal(0.0).is_err());
        assert!(scherk_extremal(2.0).is_err());
        let p = scherk_extremal(FRAC_PI_2).unwrap();
        assert!(p.at_extremal_angle);
        let p = scherk_extremal(1.0).unwrap();
        assert!(!p.at_extremal_angle);
    }
}
