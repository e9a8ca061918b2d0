//! Sphere slices of a mesh and the polyline quantities built on them:
//! length, winding about an axis, and turning measured in the surface's
//! tangent planes. A slice at radius R is the level set of the linear
//! interpolant of |x| along edges, chained into loops across triangles.

use std::collections::HashMap;

use surface_gen::SurfaceMesh;

use crate::{
    add, cross, dot, lerp, norm, normalize, plane_basis, sub, MultigraphError,
};

/// One chained component of a sphere slice. `points[i]` connects to
/// `points[i + 1]`, and back to the front when `closed`. `normals` carries
/// the interpolated surface normal at each point.
pub(crate) struct SliceLoop {
    pub points: Vec<[f64; 3]>,
    pub normals: Vec<[f64; 3]>,
    pub closed: bool,
}

impl SliceLoop {
    pub fn length(&self) -> f64 {
        let mut total = 0.0;
        for w in self.points.windows(2) {
            total += norm(sub(w[1], w[0]));
        }
        if self.closed && self.points.len() > 2 {
            total += norm(sub(self.points[0], *self.points.last().unwrap()));
        }
        total
    }

    /// Sum of signed turning angles at the joints, each measured in the
    /// tangent plane of the interpolated normal there. Closed loops turn
    /// through every joint; open chains skip the two ends. The sign of the
    /// traversal is quotiented out.
    pub fn turning(&self) -> f64 {
        let n = self.points.len();
        if n < 3 {
            return 0.0;
        }
        let mut total = 0.0;
        let joints: Box<dyn Iterator<Item = usize>> = if self.closed {
            Box::new(0..n)
        } else {
            Box::new(1..n - 1)
        };
        for i in joints {
            let prev = self.points[(i + n - 1) % n];
            let here = self.points[i];
            let next = self.points[(i + 1) % n];
            let a = sub(here, prev);
            let b = sub(next, here);
            let plane = match normalize(self.normals[i]) {
                Some(p) => p,
                None => continue,
            };
            total += f64::atan2(dot(plane, cross(a, b)), dot(a, b));
        }
        total.abs()
    }

    /// Winding number of the projection onto the plane orthogonal to `axis`.
    pub fn winding(&self, axis: [f64; 3]) -> Result<i64, MultigraphError> {
        if !self.closed {
            return Err(MultigraphError::DegenerateWinding);
        }
        let (e1, e2) = plane_basis(axis);
        let proj: Vec<(f64, f64)> = self
            .points
            .iter()
            .map(|&p| (dot(p, e1), dot(p, e2)))
            .collect();
        winding_about_origin(&proj)
    }
}

pub(crate) fn winding_about_origin(proj: &[(f64, f64)]) -> Result<i64, MultigraphError> {
    let largest = proj
        .iter()
        .map(|&(x, y)| x.hypot(y))
        .fold(0.0_f64, f64::max);
    let closest = proj
        .iter()
        .map(|&(x, y)| x.hypot(y))
        .fold(f64::INFINITY, f64::min);
    if closest < 1e-9 * largest || largest == 0.0 {
        return Err(MultigraphError::ProjectionHitsOrigin { closest });
    }
    let mut total = 0.0;
    for i in 0..proj.len() {
        let (x0, y0) = proj[i];
        let (x1, y1) = proj[(i + 1) % proj.len()];
        total += f64::atan2(x0 * y1 - y0 * x1, x0 * x1 + y0 * y1);
    }
    let turns = total / std::f64::consts::TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.25 {
        return Err(MultigraphError::DegenerateWinding);
    }
    Ok(rounded as i64)
}

pub(crate) fn vertex_radii(mesh: &SurfaceMesh) -> Vec<f64> {
    mesh.vertices.iter().map(|&p| norm(p)).collect()
}

type EdgeKey = (usize, usize);

fn edge_key(a: usize, b: usize) -> EdgeKey {
    (a.min(b), a.max(b))
}

/// All components of the slice at `radius`, each chained as far as the
/// triangulation connects it. Walk order is deterministic: components start
/// at the lowest-index crossed triangle. Vertex radii within a relative
/// 1e-12 of the sphere are snapped onto it, so a slice along a mesh row
/// reproduces the row polygon exactly.
pub(crate) fn sphere_slice(mesh: &SurfaceMesh, radius: f64) -> Vec<SliceLoop> {
    let mut rho = vertex_radii(mesh);
    let snap = 1e-12 * radius;
    for r in rho.iter_mut() {
        if (*r - radius).abs() <= snap {
            *r = radius;
        }
    }
    let loops = slice_classified(mesh, &rho, radius, false);
    if loops.is_empty() && rho.contains(&radius) {
        // The sphere only touches the mesh, along vertices snapped onto
        // it; counting those as inside turns the touch line into the
        // slice. Happens when `radius` is the innermost mesh row.
        return slice_classified(mesh, &rho, radius, true);
    }
    loops
}

fn slice_classified(
    mesh: &SurfaceMesh,
    rho: &[f64],
    radius: f64,
    on_sphere_is_inside: bool,
) -> Vec<SliceLoop> {
    let outside: Vec<bool> = rho
        .iter()
        .map(|&r| if on_sphere_is_inside { r > radius } else { r >= radius })
        .collect();
    // Each triangle with vertices on both sides contributes one segment
    // between its two crossed edges.
    let mut segs: Vec<[EdgeKey; 2]> = Vec::new();
    for tri in &mesh.triangles {
        let mut keys: Vec<EdgeKey> = Vec::new();
        for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
            if outside[a] != outside[b] {
                keys.push(edge_key(a, b));
            }
        }
        if keys.len() == 2 {
            segs.push([keys[0], keys[1]]);
        }
    }
    let mut by_key: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (i, keys) in segs.iter().enumerate() {
        by_key.entry(keys[0]).or_default().push(i);
        by_key.entry(keys[1]).or_default().push(i);
    }
    let crossing = |key: EdgeKey| -> ([f64; 3], [f64; 3]) {
        let (a, b) = key;
        let t = (radius - rho[a]) / (rho[b] - rho[a]);
        let p = lerp(mesh.vertices[a], mesh.vertices[b], t);
        let n = lerp(mesh.normal[a], mesh.normal[b], t);
        (p, n)
    };
    let mut used = vec![false; segs.len()];
    let mut loops = Vec::new();
    for start in 0..segs.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let start_key = segs[start][0];
        let mut chain: std::collections::VecDeque<EdgeKey> = std::collections::VecDeque::new();
        chain.push_back(start_key);
        chain.push_back(segs[start][1]);
        let mut exit = segs[start][1];
        let mut closed = false;
        loop {
            let next = by_key[&exit].iter().copied().find(|&s| !used[s]);
            match next {
                Some(s) => {
                    used[s] = true;
                    exit = if segs[s][0] == exit { segs[s][1] } else { segs[s][0] };
                    if exit == start_key {
                        closed = true;
                        break;
                    }
                    chain.push_back(exit);
                }
                None => break,
            }
        }
        if !closed {
            // The forward walk hit a mesh boundary; extend backwards too.
            let mut entry = start_key;
            loop {
                let prev = by_key[&entry].iter().copied().find(|&s| !used[s]);
                match prev {
                    Some(s) => {
                        used[s] = true;
                        entry = if segs[s][0] == entry { segs[s][1] } else { segs[s][0] };
                        chain.push_front(entry);
                    }
                    None => break,
                }
            }
        }
        let mut points = Vec::with_capacity(chain.len());
        let mut normals = Vec::with_capacity(chain.len());
        for &key in &chain {
            let (p, n) = crossing(key);
            points.push(p);
            normals.push(n);
        }
        collapse_duplicates(&mut points, &mut normals, closed, 1e-12 * radius);
        if points.len() >= 2 {
            loops.push(SliceLoop {
                points,
                normals,
                closed,
            });
        }
    }
    loops
}

/// Crossing points can coincide when a vertex sits exactly on the sphere;
/// the zero-length segments would poison the turning angles.
fn collapse_duplicates(
    points: &mut Vec<[f64; 3]>,
    normals: &mut Vec<[f64; 3]>,
    closed: bool,
    tol: f64,
) {
    let mut keep_points: Vec<[f64; 3]> = Vec::with_capacity(points.len());
    let mut keep_normals: Vec<[f64; 3]> = Vec::with_capacity(points.len());
    for i in 0..points.len() {
        if let Some(&last) = keep_points.last() {
            if norm(sub(points[i], last)) <= tol {
                continue;
            }
        }
        keep_points.push(points[i]);
        keep_normals.push(normals[i]);
    }
    if closed && keep_points.len() > 1 {
        let first = keep_points[0];
        if norm(sub(*keep_points.last().unwrap(), first)) <= tol {
            keep_points.pop();
            keep_normals.pop();
        }
    }
    *points = keep_points;
    *normals = keep_normals;
}

/// Area of the part of the mesh with linearized radius in `[r_lo, r_hi]`.
/// Each triangle is clipped against both bounds, so a triangle partially in
/// the band contributes exactly its clipped polygon.
pub(crate) fn band_area(mesh: &SurfaceMesh, r_lo: f64, r_hi: f64) -> f64 {
    let rho = vertex_radii(mesh);
    let mut total = 0.0;
    for tri in &mesh.triangles {
        let poly: Vec<([f64; 3], f64)> = tri
            .iter()
            .map(|&v| (mesh.vertices[v], rho[v]))
            .collect();
        let poly = clip_keep_nonnegative(&poly, |r| r - r_lo);
        let poly = clip_keep_nonnegative(&poly, |r| r_hi - r);
        total += polygon_area(&poly);
    }
    total
}

/// One Sutherland-Hodgman pass: keeps the region where `signed(rho) >= 0`,
/// interpolating both position and rho at the cuts.
fn clip_keep_nonnegative(
    poly: &[([f64; 3], f64)],
    signed: impl Fn(f64) -> f64,
) -> Vec<([f64; 3], f64)> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let (p0, r0) = poly[i];
        let (p1, r1) = poly[(i + 1) % poly.len()];
        let (s0, s1) = (signed(r0), signed(r1));
        if s0 >= 0.0 {
            out.push((p0, r0));
        }
        if (s0 >= 0.0) != (s1 >= 0.0) {
            let t = s0 / (s0 - s1);
            out.push((lerp(p0, p1, t), r0 + t * (r1 - r0)));
        }
    }
    out
}

fn polygon_area(poly: &[([f64; 3], f64)]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = [0.0; 3];
    let origin = poly[0].0;
    for i in 1..poly.len() - 1 {
        let c = cross(sub(poly[i].0, origin), sub(poly[i + 1].0, origin));
        acc = add(acc, c);
    }
    0.5 * norm(acc)
}

/// Total turning of the slice at `sphere_radius` and its distance to a
/// whole number of turns. The number of turns is read off the slice itself:
/// each closed component is projected along its mean normal and its winding
/// about the origin is counted; components that cannot be counted that way
/// fall back to the nearest whole number of turns.
pub fn boundary_geodesic_curvature(
    mesh: &SurfaceMesh,
    sphere_radius: f64,
) -> Result<(f64, f64), MultigraphError> {
    if !(sphere_radius > 0.0) {
        return Err(MultigraphError::InvalidParameter(format!(
            "sphere radius must be positive, got {sphere_radius}"
        )));
    }
    let loops = sphere_slice(mesh, sphere_radius);
    if loops.is_empty() {
        return Err(MultigraphError::EmptySlice {
            radius: sphere_radius,
        });
    }
    let mut kappa = 0.0;
    let mut turns: u32 = 0;
    for lp in &loops {
        let t = lp.turning();
        kappa += t;
        let mean = lp.normals.iter().fold([0.0; 3], |acc, &n| add(acc, n));
        let counted = normalize(mean)
            .filter(|_| lp.closed)
            .and_then(|axis| lp.winding(axis).ok())
            .map(|w| w.unsigned_abs() as u32);
        let fallback = (t / std::f64::consts::TAU).round().max(1.0) as u32;
        turns += counted.filter(|&w| w > 0).unwrap_or(fallback);
    }
    let deviation = (kappa - std::f64::consts::TAU * f64::from(turns)).abs();
    Ok((kappa, deviation))
}
