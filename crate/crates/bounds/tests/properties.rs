use proptest::prelude::*;

use bounds::{chord_arc, monotonicity_radius, stable_curvature_threshold, tol, Value};

#[test]
fn continuity_across_zero_curvature() {
    for &h0 in &[0.25, 1.0, 2.0, 17.5] {
        for sign in [1.0, -1.0] {
            let r = monotonicity_radius(sign * tol::CONTINUITY_PROBE, h0)
                .finite()
                .expect("probe radius must be finite for h0 > 0");
            assert!(
                (r - 1.0 / h0).abs() <= tol::CONTINUITY,
                "h0 = {h0}, sign = {sign}: {r}"
            );
        }
    }
}

#[test]
fn chord_arc_strictly_increasing() {
    for i in 0..12u32 {
        for b in 0..12u32 {
            let here = chord_arc(i, b);
            let up_i = chord_arc(i + 1, b);
            let up_b = chord_arc(i, b + 1);
            assert!(up_i.l_hat > here.l_hat && up_i.c_hat > here.c_hat);
            assert!(up_b.l_hat > here.l_hat && up_b.c_hat > here.c_hat);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    // R0 carries dimensions of length: scaling (a, h0) by (s^2, s) scales it by 1/s
    #[test]
    fn monotonicity_radius_scales_inversely(
        a in -4.0f64..4.0,
        h0 in 0.01f64..5.0,
        lambda in 0.1f64..10.0,
    ) {
        let base = monotonicity_radius(a, h0);
        let scaled = monotonicity_radius(lambda * lambda * a, lambda * h0);
        match (base, scaled) {
            (Value::Finite(r), Value::Finite(rs)) => {
                prop_assert!((rs - r / lambda).abs() <= 1e-9 * (1.0 + r / lambda));
            }
            (Value::Infinite, Value::Infinite) => {}
            other => prop_assert!(false, "finiteness must be scale-invariant, got {other:?}"),
        }
    }

    #[test]
    fn threshold_monotone_in_eps(
        eps in 1e-3f64..1e3,
        a0 in 0.0f64..100.0,
        k0 in 0.0f64..10.0,
    ) {
        let cs = 2.0 * std::f64::consts::PI;
        let v = stable_curvature_threshold(eps, a0, cs, k0).unwrap();
        let vh = stable_curvature_threshold(eps / 2.0, a0, cs, k0).unwrap();
        prop_assert!(vh >= v);
    }
}
