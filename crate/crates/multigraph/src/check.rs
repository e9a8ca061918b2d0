//! The annulus checks themselves: per-band normal geometry, slice length
//! at the inner radius, sheet count by winding, and the flat-graph
//! conclusions over a reference plane.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use rayon::prelude::*;
use surface_gen::SurfaceMesh;

use crate::slice::{band_area, sphere_slice, vertex_radii, winding_about_origin};
use crate::{
    add, cross, dot, norm, normalize, plane_basis, residual_keys, scale, sub, AnnulusCheck,
    MultigraphError,
};

const REL_TOL: f64 = 1e-9;

/// Dyadic cover of `[r1, r2]`: doubling bands from `r1`, with a final band
/// `[r2/2, r2]` when doubling does not land on `r2` exactly.
fn dyadic_bands(r1: f64, r2: f64) -> Vec<(f64, f64)> {
    let mut bands = Vec::new();
    let mut lo = r1;
    while 2.0 * lo <= r2 * (1.0 + 1e-12) {
        bands.push((lo, (2.0 * lo).min(r2)));
        lo *= 2.0;
    }
    if let Some(&(_, hi)) = bands.last() {
        if hi < r2 * (1.0 - 1e-12) {
            bands.push((r2 / 2.0, r2));
        }
    }
    bands
}

fn band_vertices(rho: &[f64], lo: f64, hi: f64) -> Vec<usize> {
    (0..rho.len())
        .filter(|&v| rho[v] >= lo * (1.0 - REL_TOL) && rho[v] <= hi * (1.0 + REL_TOL))
        .collect()
}

/// Reference normal of a set of vertices: the normalized mean. A spread-out
/// normal image can cancel the mean; the normal of the outermost vertex
/// then anchors the measurement instead, which keeps the reported spread
/// large rather than undefined.
fn reference_normal(mesh: &SurfaceMesh, rho: &[f64], verts: &[usize]) -> [f64; 3] {
    let mean = verts
        .iter()
        .fold([0.0; 3], |acc, &v| add(acc, mesh.normal[v]));
    if let Some(v) = normalize(scale(mean, 1.0 / verts.len() as f64)) {
        return v;
    }
    let outermost = verts
        .iter()
        .copied()
        .max_by(|&a, &b| rho[a].total_cmp(&rho[b]).then(b.cmp(&a)))
        .expect("verts is non-empty");
    mesh.normal[outermost]
}

struct BandReading {
    normal: [f64; 3],
    angle_deficit: f64,
    gauss_spread: f64,
}

fn read_band(
    mesh: &SurfaceMesh,
    rho: &[f64],
    lo: f64,
    hi: f64,
) -> Result<BandReading, MultigraphError> {
    let verts = band_vertices(rho, lo, hi);
    if verts.is_empty() {
        return Err(MultigraphError::EmptyBand { lo, hi });
    }
    let normal = reference_normal(mesh, rho, &verts);
    let mut angle_deficit = 0.0_f64;
    let mut gauss_spread = 0.0_f64;
    for &v in &verts {
        let n = mesh.normal[v];
        if rho[v] > 0.0 {
            let radial = scale(mesh.vertices[v], 1.0 / rho[v]);
            // The surface meets the sphere at pi/2 minus this deficit.
            angle_deficit = angle_deficit.max(dot(n, radial).abs().clamp(0.0, 1.0).asin());
        }
        gauss_spread = gauss_spread.max(dot(n, normal).clamp(-1.0, 1.0).acos());
    }
    Ok(BandReading {
        normal,
        angle_deficit,
        gauss_spread,
    })
}

fn span_or_err(
    rho: &[f64],
    r1: f64,
    r2: f64,
    need_inner: bool,
) -> Result<(), MultigraphError> {
    let found_min = rho.iter().copied().fold(f64::INFINITY, f64::min);
    let found_max = rho.iter().copied().fold(0.0_f64, f64::max);
    let inner_cap = if need_inner { r1 * (1.0 + REL_TOL) } else { r2 * (1.0 - REL_TOL) };
    if found_max < r2 * (1.0 - REL_TOL) || found_min > inner_cap {
        return Err(MultigraphError::MeshDoesNotSpan {
            r1,
            r2,
            found_min,
            found_max,
        });
    }
    Ok(())
}

/// Grades the mesh against the flat-graph hypotheses on `[r1, r2]`: every
/// band's worst sphere angle and normal spread against `alpha`, and the
/// inner slice length against `l0 * r1`. A mesh that stays outside the
/// inner sphere passes the length check with an empty slice; a mesh that
/// never reaches the span is refused.
pub fn check_hypotheses(
    mesh: &SurfaceMesh,
    r1: f64,
    r2: f64,
    alpha: f64,
    l0: f64,
) -> Result<AnnulusCheck, MultigraphError> {
    if !(r1 > 0.0) || !(r1 <= r2 / 2.0) {
        return Err(MultigraphError::InvalidRadii { r1, r2 });
    }
    if !(alpha > 0.0) || alpha > std::f64::consts::PI / 2.0 {
        return Err(MultigraphError::InvalidParameter(format!(
            "alpha must lie in (0, pi/2], got {alpha}"
        )));
    }
    if !(l0 > 0.0) {
        return Err(MultigraphError::InvalidParameter(format!(
            "l0 must be positive, got {l0}"
        )));
    }
    let rho = vertex_radii(mesh);
    span_or_err(&rho, r1, r2, false)?;
    let bands = dyadic_bands(r1, r2);
    // Bands are independent; the collect keeps them in inner-first order.
    let readings: Vec<BandReading> = bands
        .par_iter()
        .map(|&(lo, hi)| read_band(mesh, &rho, lo, hi))
        .collect::<Result<_, _>>()?;
    let angle_deficit = readings
        .iter()
        .map(|r| r.angle_deficit)
        .fold(0.0_f64, f64::max);
    let gauss_spread = readings
        .iter()
        .map(|r| r.gauss_spread)
        .fold(0.0_f64, f64::max);
    let inner_length = sphere_slice(mesh, r1)
        .iter()
        .fold(0.0, |acc, lp| acc + lp.length());
    let length_ratio = inner_length / r1;

    let mut residuals = BTreeMap::new();
    let mut passed = BTreeMap::new();
    let mut put = |key: &str, value: f64, ok: bool| {
        residuals.insert(key.to_string(), value);
        passed.insert(key.to_string(), ok);
    };
    put(residual_keys::ANGLE_DEFICIT, angle_deficit, angle_deficit <= alpha);
    put(residual_keys::GAUSS_SPREAD, gauss_spread, gauss_spread <= alpha);
    put(residual_keys::LENGTH_RATIO, length_ratio, length_ratio < l0);
    finite_or_err(&residuals)?;
    Ok(AnnulusCheck {
        r1,
        r2,
        alpha: Some(alpha),
        l0: Some(l0),
        tau: None,
        plane_normal: readings.into_iter().map(|r| r.normal).collect(),
        multiplicity: None,
        residuals,
        passed,
    })
}

fn finite_or_err(residuals: &BTreeMap<String, f64>) -> Result<(), MultigraphError> {
    for (key, value) in residuals {
        if !value.is_finite() {
            return Err(MultigraphError::BadMesh(format!(
                "residual {key} came out non-finite"
            )));
        }
    }
    Ok(())
}

/// Number of sheets, read as the winding of a boundary loop's projection
/// about the origin of the plane orthogonal to `plane_normal`. The loop
/// whose projection stays farthest from the origin is counted. With `l0`
/// supplied the count is held to the cap `(l0 + 1) / 2 pi` that a passing
/// inner slice implies.
pub fn multiplicity(
    mesh: &SurfaceMesh,
    plane_normal: [f64; 3],
    l0: Option<f64>,
) -> Result<u32, MultigraphError> {
    let axis = normalize(plane_normal).ok_or_else(|| {
        MultigraphError::InvalidParameter("plane normal has zero length".into())
    })?;
    if mesh.boundary_loops.is_empty() {
        return Err(MultigraphError::BadMesh("mesh has no boundary loop".into()));
    }
    let (e1, e2) = plane_basis(axis);
    let project = |loop_verts: &[usize]| -> Vec<(f64, f64)> {
        loop_verts
            .iter()
            .map(|&v| {
                let p = mesh.vertices[v];
                (dot(p, e1), dot(p, e2))
            })
            .collect()
    };
    let chosen = mesh
        .boundary_loops
        .iter()
        .map(|lp| project(lp))
        .max_by(|a, b| {
            let closest = |proj: &Vec<(f64, f64)>| {
                proj.iter()
                    .map(|&(x, y)| x.hypot(y))
                    .fold(f64::INFINITY, f64::min)
            };
            closest(a).total_cmp(&closest(b))
        })
        .expect("boundary_loops is non-empty");
    let w = winding_about_origin(&chosen)?;
    let m = w.unsigned_abs() as u32;
    if m == 0 {
        return Err(MultigraphError::DegenerateWinding);
    }
    if let Some(l0) = l0 {
        let cap = (l0 + 1.0) / std::f64::consts::TAU;
        if f64::from(m) > cap {
            return Err(MultigraphError::MultiplicityAboveCap { m, cap, l0 });
        }
    }
    Ok(m)
}

/// Intrinsic distance between the slices at `r1` and `r`, by Dijkstra over
/// chords between vertices up to two edges apart. Paths enter on the inner
/// sphere, either at a vertex lying on it or part way along a crossing
/// edge, and exit the same way on the outer sphere.
fn sphere_gap_distance(
    mesh: &SurfaceMesh,
    rho: &[f64],
    r1: f64,
    r: f64,
) -> Result<f64, MultigraphError> {
    let n = mesh.vertices.len();
    let inside = |v: usize| rho[v] <= r * (1.0 + REL_TOL);
    let mut ring: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for tri in &mesh.triangles {
        for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
            if inside(a) && inside(b) {
                ring[a].insert(b);
                ring[b].insert(a);
            }
        }
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut heap: BinaryHeap<std::cmp::Reverse<(u64, usize)>> = BinaryHeap::new();
    let seed = |v: usize, d: f64, dist: &mut Vec<f64>| {
        if d < dist[v] {
            dist[v] = d;
        }
    };
    for v in 0..n {
        if rho[v] <= r1 * (1.0 + REL_TOL) {
            seed(v, 0.0, &mut dist);
        }
    }
    for tri in &mesh.triangles {
        for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
            if rho[a] < r1 && r1 < rho[b] {
                let t = (r1 - rho[a]) / (rho[b] - rho[a]);
                let q = crate::lerp(mesh.vertices[a], mesh.vertices[b], t);
                seed(b, norm(sub(mesh.vertices[b], q)), &mut dist);
            }
        }
    }
    if dist.iter().all(|d| !d.is_finite()) {
        let found_min = rho.iter().copied().fold(f64::INFINITY, f64::min);
        let found_max = rho.iter().copied().fold(0.0_f64, f64::max);
        return Err(MultigraphError::MeshDoesNotSpan {
            r1,
            r2: r,
            found_min,
            found_max,
        });
    }
    // f64 bits of a non-negative distance sort like the distance.
    for v in 0..n {
        if dist[v] == 0.0 {
            heap.push(std::cmp::Reverse((0, v)));
        } else if dist[v].is_finite() {
            heap.push(std::cmp::Reverse((dist[v].to_bits(), v)));
        }
    }
    while let Some(std::cmp::Reverse((bits, v))) = heap.pop() {
        let d = f64::from_bits(bits);
        if d > dist[v] {
            continue;
        }
        let mut hop: BTreeSet<usize> = ring[v].clone();
        for &w in &ring[v] {
            hop.extend(ring[w].iter().copied());
        }
        hop.remove(&v);
        for w in hop {
            let cand = d + norm(sub(mesh.vertices[w], mesh.vertices[v]));
            if cand < dist[w] {
                dist[w] = cand;
                heap.push(std::cmp::Reverse((cand.to_bits(), w)));
            }
        }
    }
    let mut best = f64::INFINITY;
    for v in 0..n {
        if rho[v] >= r * (1.0 - REL_TOL) && dist[v] < best {
            best = dist[v];
        }
    }
    for tri in &mesh.triangles {
        for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
            if rho[a] < r && r < rho[b] && dist[a].is_finite() {
                let t = (r - rho[a]) / (rho[b] - rho[a]);
                let q = crate::lerp(mesh.vertices[a], mesh.vertices[b], t);
                let cand = dist[a] + norm(sub(q, mesh.vertices[a]));
                if cand < best {
                    best = cand;
                }
            }
        }
    }
    if !best.is_finite() {
        let found_min = rho.iter().copied().fold(f64::INFINITY, f64::min);
        let found_max = rho.iter().copied().fold(0.0_f64, f64::max);
        return Err(MultigraphError::MeshDoesNotSpan {
            r1,
            r2: r,
            found_min,
            found_max,
        });
    }
    Ok(best)
}

/// Gradient of the linear interpolant of `u` over the triangle, as a vector
/// in the triangle's plane.
fn tangential_gradient(p: [[f64; 3]; 3], u: [f64; 3]) -> [f64; 3] {
    let n = cross(sub(p[1], p[0]), sub(p[2], p[0]));
    let nn = dot(n, n);
    if nn == 0.0 {
        return [0.0; 3];
    }
    let g = add(
        add(
            scale(cross(n, sub(p[2], p[1])), u[0]),
            scale(cross(n, sub(p[0], p[2])), u[1]),
        ),
        scale(cross(n, sub(p[1], p[0])), u[2]),
    );
    scale(g, 1.0 / nn)
}

/// Worst height-to-radius ratio plus slope over the plane orthogonal to
/// `axis`, over triangles fully inside the band. The tangential slope is
/// converted to the slope of the graph over the plane.
fn graph_bound(
    mesh: &SurfaceMesh,
    rho: &[f64],
    axis: [f64; 3],
    r_lo: f64,
    r_hi: f64,
) -> f64 {
    let mut worst = 0.0_f64;
    for tri in &mesh.triangles {
        if tri
            .iter()
            .any(|&v| rho[v] < r_lo * (1.0 - REL_TOL) || rho[v] > r_hi * (1.0 + REL_TOL))
        {
            continue;
        }
        let p = [
            mesh.vertices[tri[0]],
            mesh.vertices[tri[1]],
            mesh.vertices[tri[2]],
        ];
        let u = [dot(p[0], axis), dot(p[1], axis), dot(p[2], axis)];
        let mut ratio = 0.0_f64;
        for i in 0..3 {
            let planar = norm(sub(p[i], scale(axis, u[i])));
            if planar > 1e-12 * r_lo {
                ratio = ratio.max(u[i].abs() / planar);
            }
        }
        let gt = norm(tangential_gradient(p, u));
        let slope = gt / (1.0 - (gt * gt).min(1.0 - 1e-12)).sqrt();
        worst = worst.max(ratio + slope);
    }
    worst
}

/// Grades the flat-graph conclusions on `[r1, r]` for a claimed sheet count
/// `m`: outer slice length against `2 pi m r`, intrinsic gap distance
/// against the radial gap, band area against `pi m (r^2 - r1^2)`, outer
/// slice turning against `2 pi m`, and the height and slope of the sheets
/// over the band's reference plane. Length and area residuals are graded
/// against the slope budget `tau`; `full_check` tightens them once the
/// measured normal spread is known.
pub fn check_conclusions(
    mesh: &SurfaceMesh,
    m: u32,
    r1: f64,
    r: f64,
    tau: f64,
) -> Result<AnnulusCheck, MultigraphError> {
    if m == 0 {
        return Err(MultigraphError::InvalidParameter(
            "sheet count m must be at least 1".into(),
        ));
    }
    if !(r1 > 0.0) || !(r1 < r) {
        return Err(MultigraphError::InvalidRadii { r1, r2: r });
    }
    if !(tau > 0.0) || tau > crate::DEFAULT_TAU * (1.0 + 1e-12) {
        return Err(MultigraphError::InvalidParameter(format!(
            "tau must lie in (0, pi/10], got {tau}"
        )));
    }
    let rho = vertex_radii(mesh);
    span_or_err(&rho, r1, r, true)?;
    let verts = band_vertices(&rho, r1, r);
    if verts.is_empty() {
        return Err(MultigraphError::EmptyBand { lo: r1, hi: r });
    }
    let axis = reference_normal(mesh, &rho, &verts);
    let mf = f64::from(m);
    let target_circle = std::f64::consts::TAU * mf * r;

    let outer_length = sphere_slice(mesh, r)
        .iter()
        .fold(0.0, |acc, lp| acc + lp.length());
    let length_residual = (outer_length - target_circle).abs() / r;
    let gap = sphere_gap_distance(mesh, &rho, r1, r)?;
    let distance_ratio = gap / (r - r1);
    let area = band_area(mesh, r1, r);
    let flat_area = std::f64::consts::PI * mf * (r * r - r1 * r1);
    let area_residual = (area - flat_area).abs() / (r * r - r1 * r1);
    let (_, turning_deviation) = crate::slice::boundary_geodesic_curvature(mesh, r)?;
    let graph = graph_bound(mesh, &rho, axis, r1, r);

    let mut residuals = BTreeMap::new();
    let mut passed = BTreeMap::new();
    let mut put = |key: &str, value: f64, ok: bool| {
        residuals.insert(key.to_string(), value);
        passed.insert(key.to_string(), ok);
    };
    put(residual_keys::LENGTH_RESIDUAL, length_residual, length_residual < tau);
    put(
        residual_keys::DISTANCE_RATIO,
        distance_ratio,
        distance_ratio <= (1.0 + tau * tau / 4.0).sqrt(),
    );
    put(residual_keys::AREA_RESIDUAL, area_residual, area_residual < tau);
    put(
        residual_keys::TURNING_DEVIATION,
        turning_deviation,
        turning_deviation <= tau / mf,
    );
    put(residual_keys::GRAPH_BOUND, graph, graph < tau / 2.0);
    finite_or_err(&residuals)?;
    Ok(AnnulusCheck {
        r1,
        r2: r,
        alpha: None,
        l0: None,
        tau: Some(tau),
        plane_normal: vec![axis],
        multiplicity: Some(m),
        residuals,
        passed,
    })
}

/// Hypotheses, sheet count, and conclusions in one pass over `[r1, r2]`.
/// The sheet count is read in the projection of the innermost band's
/// reference normal, and the length and area residuals are re-graded
/// against [`crate::residual_tolerance`] of the supplied `alpha`.
pub fn full_check(
    mesh: &SurfaceMesh,
    r1: f64,
    r2: f64,
    alpha: f64,
    l0: f64,
    tau: f64,
) -> Result<AnnulusCheck, MultigraphError> {
    let hyp = check_hypotheses(mesh, r1, r2, alpha, l0)?;
    let axis = hyp.plane_normal[0];
    let m = multiplicity(mesh, axis, Some(l0))?;
    let conc = check_conclusions(mesh, m, r1, r2, tau)?;
    let mut residuals = hyp.residuals;
    let mut passed = hyp.passed;
    residuals.extend(conc.residuals);
    passed.extend(conc.passed);
    let tol = crate::residual_tolerance(alpha, tau);
    for key in [residual_keys::LENGTH_RESIDUAL, residual_keys::AREA_RESIDUAL] {
        let value = residuals[key];
        passed.insert(key.to_string(), value < tol);
    }
    Ok(AnnulusCheck {
        r1,
        r2,
        alpha: Some(alpha),
        l0: Some(l0),
        tau: Some(tau),
        plane_normal: hyp.plane_normal,
        multiplicity: Some(m),
        residuals,
        passed,
    })
}
