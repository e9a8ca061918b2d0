//! Report for a curvature-carrying piece: its area against the scales it
//! lives between, its curvature load, and the turning of its boundary
//! against the spinning of its ends.

use report::{Check, VerificationReport};
use surface_gen::{total_curvature, SurfaceMesh};

use crate::{dot, norm, sub, MultigraphError, DEFAULT_TAU};

/// Total turning of the mesh boundary: at each boundary vertex the
/// exterior angle is pi minus the incident triangle angles, and the loops
/// are summed in stored order. Interior vertices contribute through the
/// closed-surface identity instead, so a jagged cut boundary still turns
/// by the correct total.
pub(crate) fn boundary_turning(mesh: &SurfaceMesh) -> f64 {
    let mut angle_sum = vec![0.0_f64; mesh.vertices.len()];
    for tri in &mesh.triangles {
        for i in 0..3 {
            let p = mesh.vertices[tri[i]];
            let a = sub(mesh.vertices[tri[(i + 1) % 3]], p);
            let b = sub(mesh.vertices[tri[(i + 2) % 3]], p);
            let denom = norm(a) * norm(b);
            if denom > 0.0 {
                angle_sum[tri[i]] += (dot(a, b) / denom).clamp(-1.0, 1.0).acos();
            }
        }
    }
    mesh.boundary_loops
        .iter()
        .flat_map(|lp| lp.iter())
        .map(|&v| std::f64::consts::PI - angle_sum[v])
        .sum()
}

/// Grades one piece against the structure a curvature concentration must
/// have. `m_list` holds the spinning of each end of the piece, `r_f` its
/// extrinsic radius, `delta1` the core scale its area must fill, and
/// `delta4` the outer scale both must sit well inside. Checks, in order:
/// area at most the flat-sheet budget of the ends, area at least the core
/// disk, curvature load above the concentration floor, boundary turning
/// within the spinning window, and the scale nesting itself.
pub fn delta_piece_report(
    mesh: &SurfaceMesh,
    m_list: &[u32],
    r_f: f64,
    delta1: f64,
    delta4: f64,
) -> Result<VerificationReport, MultigraphError> {
    if m_list.is_empty() {
        return Err(MultigraphError::InvalidParameter(
            "m_list must name at least one end".into(),
        ));
    }
    if m_list.contains(&0) {
        return Err(MultigraphError::InvalidParameter(
            "every end must spin at least once".into(),
        ));
    }
    for (name, value) in [("r_f", r_f), ("delta1", delta1), ("delta4", delta4)] {
        if !(value > 0.0) {
            return Err(MultigraphError::InvalidParameter(format!(
                "{name} must be positive, got {value}"
            )));
        }
    }
    if mesh.normal.len() != mesh.vertices.len() {
        return Err(MultigraphError::BadMesh(
            "vertex and normal counts disagree".into(),
        ));
    }
    let spin_total: u32 = m_list.iter().sum();
    let s = f64::from(spin_total);
    let tau = DEFAULT_TAU;
    let area = mesh.area();
    let curvature_load = -total_curvature(mesh);
    let turning = boundary_turning(mesh);

    let mut r = VerificationReport::new(&format!("{} piece", mesh.meta.family));
    r.push(Check::at_most(
        "area_vs_end_scale",
        area,
        std::f64::consts::TAU * s * r_f * r_f,
    ));
    r.push(Check::at_least(
        "area_vs_core_scale",
        area,
        std::f64::consts::PI * delta1 * delta1,
    ));
    let floor = Check::at_least(
        "curvature_concentration",
        curvature_load,
        3.0 * std::f64::consts::PI,
    );
    r.push(if floor.passed {
        floor
    } else {
        floor.with_note("not a concentration piece")
    });
    r.push(Check::within_abs(
        "boundary_turning_vs_spinning",
        turning - std::f64::consts::TAU * s,
        tau / 2.0,
    ));
    let quarter = delta4 / 4.0 * (1.0 + 1e-12);
    r.push(Check::flag(
        "scales_nested",
        delta1 <= quarter && r_f <= quarter,
    ));
    Ok(r)
}
