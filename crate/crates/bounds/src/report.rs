//! Report assembly: each scalar operation gets a serializable record of
//! its inputs, value, defining formula and any identity cross-checks.

use serde::{Deserialize, Serialize};

use crate::{
    a_of_i0, area_lower_bound, chord_arc, helicoid_extremal, monotonicity_radius, scherk_extremal,
    stable_curvature_threshold, tol, yau_area_constants, BoundsError, Value,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossCheck {
    pub identity: String,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsReport {
    pub name: String,
    /// Input pairs in call order, so serialized output is deterministic.
    pub inputs: Vec<(String, f64)>,
    pub value: Value,
    /// The defining formula, written out.
    pub formula_ref: String,
    pub cross_checks: Vec<CrossCheck>,
    /// Secondary named outputs (factors, companion constants).
    pub extras: Vec<(String, f64)>,
}

impl BoundsReport {
    pub fn residuals_finite(&self) -> bool {
        self.cross_checks.iter().all(|c| c.residual.is_finite())
    }
}

pub fn chord_arc_report(index: u32, branch: u32) -> BoundsReport {
    let out = chord_arc(index, branch);
    BoundsReport {
        name: "chord_arc".into(),
        inputs: vec![("I".into(), index as f64), ("B".into(), branch as f64)],
        value: Value::Finite(out.c_hat),
        formula_ref: "l_hat = sqrt((3I + 2B + 3)/2); c_hat = 8 l_hat^3 + 2 pi l_hat^2 - 20 l_hat - pi/2".into(),
        cross_checks: vec![],
        extras: vec![("l_hat".into(), out.l_hat)],
    }
}

pub fn a_of_i0_report(i0: u32) -> BoundsReport {
    let value = a_of_i0(i0);
    let other = chord_arc(i0 + 1, 0).c_hat / 2.0;
    BoundsReport {
        name: "a_of_i0".into(),
        inputs: vec![("I0".into(), i0 as f64)],
        value: Value::Finite(value),
        formula_ref: "sqrt(6) (3 I0 + 1) sqrt(I0 + 2) + (pi/4)(6 I0 + 11)".into(),
        cross_checks: vec![CrossCheck {
            identity: "a(I0) = chord_arc(I0+1, 0).c_hat / 2".into(),
            residual: (value - other).abs(),
        }],
        extras: vec![],
    }
}

pub fn monotonicity_radius_report(a: f64, h0: f64) -> BoundsReport {
    let value = monotonicity_radius(a, h0);
    let mut cross_checks = vec![];
    if h0 > 0.0 {
        let eps = tol::CONTINUITY_PROBE;
        for (label, probe) in [("a -> 0+", eps), ("a -> 0-", -eps)] {
            let residual = match monotonicity_radius(probe, h0) {
                Value::Finite(r) => (r - 1.0 / h0).abs(),
                Value::Infinite => f64::INFINITY,
            };
            cross_checks.push(CrossCheck {
                identity: format!("continuity {label}: R0 -> 1/h0"),
                residual,
            });
        }
    }
    BoundsReport {
        name: "monotonicity_radius".into(),
        inputs: vec![("a".into(), a), ("h0".into(), h0)],
        value,
        formula_ref: "a>0: arccot(h0/sqrt(a))/sqrt(a); a=0: 1/h0 (inf at h0=0); a<0: arccoth(h0/sqrt(-a))/sqrt(-a) for h0 > sqrt(-a), else inf".into(),
        cross_checks,
        extras: vec![],
    }
}

pub fn area_lower_bound_report(
    r: f64,
    n: u32,
    a: f64,
    h0: f64,
    inj_cap: Option<f64>,
) -> Result<BoundsReport, BoundsError> {
    let value = area_lower_bound(r, n, a, h0, inj_cap)?;
    let mut inputs = vec![
        ("r".into(), r),
        ("n".into(), n as f64),
        ("a".into(), a),
        ("h0".into(), h0),
    ];
    if let Some(c) = inj_cap {
        inputs.push(("inj_cap".into(), c));
    }
    Ok(BoundsReport {
        name: "area_lower_bound".into(),
        inputs,
        value: Value::Finite(value),
        formula_ref: "omega_n r^n exp(-n h0 r) for a <= 0; omega_n r^n exp(-n r (h0 + f_a(r1) r / 2)) for a > 0".into(),
        cross_checks: vec![],
        extras: vec![],
    })
}

pub fn stable_curvature_threshold_report(
    eps: f64,
    a0: f64,
    c_s: f64,
    k0: f64,
) -> Result<BoundsReport, BoundsError> {
    let value = stable_curvature_threshold(eps, a0, c_s, k0)?;
    // monotone non-increasing in eps, checked at the halved scale
    let halved = stable_curvature_threshold(eps / 2.0, a0, c_s, k0)?;
    Ok(BoundsReport {
        name: "stable_curvature_threshold".into(),
        inputs: vec![
            ("eps".into(), eps),
            ("a0".into(), a0),
            ("c_s".into(), c_s),
            ("k0".into(), k0),
        ],
        value: Value::Finite(value),
        formula_ref: "1 + max(a0, 2 c_s / min(eps, pi/sqrt(k0)))".into(),
        cross_checks: vec![CrossCheck {
            identity: "threshold(eps/2) >= threshold(eps)".into(),
            residual: (value - halved).max(0.0),
        }],
        extras: vec![],
    })
}

pub fn yau_area_constants_report(eps0: f64, r2: f64) -> BoundsReport {
    let out = yau_area_constants(eps0, r2);
    BoundsReport {
        name: "yau_area_constants".into(),
        inputs: vec![("eps0".into(), eps0), ("r2".into(), r2)],
        value: Value::Finite(out.c_a),
        formula_ref: "c_a = min(eps0, r2^2/eps0); c0 = min(c_a eps0, c_a)".into(),
        cross_checks: vec![],
        extras: vec![("c0".into(), out.c0)],
    }
}

pub fn scherk_extremal_report(theta: f64) -> Result<BoundsReport, BoundsError> {
    let out = scherk_extremal(theta)?;
    Ok(BoundsReport {
        name: "scherk_extremal".into(),
        inputs: vec![("theta".into(), theta)],
        value: Value::Finite(out.value),
        formula_ref: "4 sqrt(2) * pi / (4 cos(theta/2)), reference value 2 pi at theta = pi/2".into(),
        cross_checks: vec![],
        extras: vec![(
            "at_extremal_angle".into(),
            if out.at_extremal_angle { 1.0 } else { 0.0 },
        )],
    })
}

pub fn helicoid_extremal_report() -> BoundsReport {
    BoundsReport {
        name: "helicoid_extremal".into(),
        inputs: vec![],
        value: Value::Finite(helicoid_extremal()),
        formula_ref: "sqrt(2) * pi/2".into(),
        cross_checks: vec![],
        extras: vec![],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_serialize_deterministically() {
        let a = serde_json::to_string(&chord_arc_report(1, 0)).unwrap();
        let b = serde_json::to_string(&chord_arc_report(1, 0)).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"l_hat\""));
    }

    #[test]
    fn monotonicity_report_records_two_sided_continuity() {
        let r = monotonicity_radius_report(0.3, 2.0);
        assert_eq!(r.cross_checks.len(), 2);
        for c in &r.cross_checks {
            assert!(c.residual <= tol::CONTINUITY, "{}: {}", c.identity, c.residual);
        }
        // no probes at h0 = 0, where 1/h0 is not a reference point
        assert!(monotonicity_radius_report(0.3, 0.0).cross_checks.is_empty());
    }

    #[test]
    fn a_of_i0_report_residual_is_tiny() {
        for i0 in 0..=20 {
            let r = a_of_i0_report(i0);
            assert!(r.cross_checks[0].residual <= tol::IDENTITY * a_of_i0(i0).abs());
        }
    }
}
