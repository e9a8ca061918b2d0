//! Submesh extraction: intrinsic balls around a vertex and extrinsic
//! annular slabs. Both return fully rebuilt meshes with fresh boundary
//! loops; any involution of the parent is dropped because a submesh need
//! not be invariant under it.

use std::collections::BinaryHeap;

use crate::{boundary_loops, norm, sub, SurfaceError, SurfaceMesh};

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    vertex: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Reversed so the binary heap pops the closest vertex first.
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest distance along mesh edges from `source` to every vertex.
/// Unreachable vertices come back as infinity. Edge paths overestimate the
/// smooth distance by one grid step, which vanishes under refinement.
pub fn geodesic_distances(
    mesh: &SurfaceMesh,
    source: usize,
) -> Result<Vec<f64>, SurfaceError> {
    let n = mesh.vertices.len();
    if source >= n {
        return Err(SurfaceError::VertexOutOfRange(source, n));
    }
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for t in &mesh.triangles {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            let w = norm(sub(mesh.vertices[a], mesh.vertices[b]));
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
    }
    let mut dist = vec![f64::INFINITY; n];
    dist[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(HeapEntry {
        dist: 0.0,
        vertex: source,
    });
    while let Some(HeapEntry { dist: d, vertex: v }) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(w, len) in &adj[v] {
            let cand = d + len;
            if cand < dist[w] {
                dist[w] = cand;
                heap.push(HeapEntry {
                    dist: cand,
                    vertex: w,
                });
            }
        }
    }
    Ok(dist)
}

/// Intrinsic ball extraction result. `clipped` reports that the ball ran
/// into the boundary of the parent mesh before reaching its radius.
#[derive(Clone, Debug)]
pub struct GeodesicBall {
    pub mesh: SurfaceMesh,
    pub clipped: bool,
}

/// Triangles whose vertices all lie within edge distance `radius` of
/// `center`. Growing the radius only ever adds triangles.
pub fn geodesic_ball(
    mesh: &SurfaceMesh,
    center: usize,
    radius: f64,
) -> Result<GeodesicBall, SurfaceError> {
    if radius <= 0.0 {
        return Err(SurfaceError::EmptyRegion(format!(
            "ball radius {radius} selects nothing"
        )));
    }
    let dist = geodesic_distances(mesh, center)?;
    // Summed edge lengths carry accumulated rounding, so a vertex that is
    // exactly at the radius may land a few ulps past it. The slack grows
    // with the radius, which keeps balls nested.
    let cut = radius * (1.0 + 1e-12);
    let keep: Vec<usize> = (0..mesh.triangles.len())
        .filter(|&t| mesh.triangles[t].iter().all(|&v| dist[v] <= cut))
        .collect();
    if keep.is_empty() {
        return Err(SurfaceError::EmptyRegion(format!(
            "no triangle fits inside radius {radius}"
        )));
    }
    let clipped = mesh
        .boundary_loops
        .iter()
        .flatten()
        .any(|&v| dist[v] < radius);
    Ok(GeodesicBall {
        mesh: submesh(mesh, &keep),
        clipped,
    })
}

/// Complement of a geodesic ball: drops every triangle whose vertices all
/// lie within `radius` of `center`, cutting a hole whose rim becomes new
/// boundary. The cut uses the same slack as `geodesic_ball`, so ball and
/// complement partition the triangles.
pub fn puncture(
    mesh: &SurfaceMesh,
    center: usize,
    radius: f64,
) -> Result<SurfaceMesh, SurfaceError> {
    if radius <= 0.0 {
        return Err(SurfaceError::EmptyRegion(format!(
            "puncture radius {radius} removes nothing"
        )));
    }
    let dist = geodesic_distances(mesh, center)?;
    let cut = radius * (1.0 + 1e-12);
    let keep: Vec<usize> = (0..mesh.triangles.len())
        .filter(|&t| mesh.triangles[t].iter().any(|&v| dist[v] > cut))
        .collect();
    if keep.len() == mesh.triangles.len() {
        return Err(SurfaceError::EmptyRegion(format!(
            "no triangle fits inside puncture radius {radius}"
        )));
    }
    if keep.is_empty() {
        return Err(SurfaceError::EmptyRegion(format!(
            "puncture radius {radius} swallows the whole mesh"
        )));
    }
    Ok(submesh(mesh, &keep))
}

/// Connected piece of the preimage of the extrinsic annulus
/// `r_in <= |x - center| <= r_out`. With a seed vertex, the piece containing
/// it; otherwise the piece with the most triangles, lowest vertex index
/// breaking ties.
pub fn extrinsic_slab(
    mesh: &SurfaceMesh,
    center: [f64; 3],
    r_in: f64,
    r_out: f64,
    seed: Option<usize>,
) -> Result<SurfaceMesh, SurfaceError> {
    if !(0.0..).contains(&r_in) || r_in >= r_out {
        return Err(SurfaceError::BadDomain(format!(
            "slab range needs 0 <= r_in < r_out, got [{r_in}, {r_out}]"
        )));
    }
    let n = mesh.vertices.len();
    let selected: Vec<bool> = mesh
        .vertices
        .iter()
        .map(|&v| {
            let r = norm(sub(v, center));
            (r_in..=r_out).contains(&r)
        })
        .collect();
    let kept: Vec<usize> = (0..mesh.triangles.len())
        .filter(|&t| mesh.triangles[t].iter().all(|&v| selected[v]))
        .collect();
    if kept.is_empty() {
        return Err(SurfaceError::EmptyRegion(format!(
            "slab [{r_in}, {r_out}] contains no triangle"
        )));
    }
    // Components over shared vertices among kept triangles.
    let mut comp_of_vertex = vec![usize::MAX; n];
    let mut comp_tris: Vec<Vec<usize>> = Vec::new();
    for &t in &kept {
        let existing = mesh.triangles[t]
            .iter()
            .map(|&v| comp_of_vertex[v])
            .find(|&c| c != usize::MAX);
        let c = match existing {
            Some(c) => c,
            None => {
                comp_tris.push(Vec::new());
                comp_tris.len() - 1
            }
        };
        // Later triangles may bridge two earlier components; merge on sight.
        for &v in &mesh.triangles[t] {
            let prev = comp_of_vertex[v];
            if prev != usize::MAX && prev != c {
                let moved = std::mem::take(&mut comp_tris[prev]);
                for &m in &moved {
                    for &mv in &mesh.triangles[m] {
                        comp_of_vertex[mv] = c;
                    }
                }
                comp_tris[c].extend(moved);
            }
            comp_of_vertex[v] = c;
        }
        comp_tris[c].push(t);
    }
    let chosen: &Vec<usize> = match seed {
        Some(s) => {
            if s >= n {
                return Err(SurfaceError::VertexOutOfRange(s, n));
            }
            if comp_of_vertex[s] == usize::MAX {
                return Err(SurfaceError::EmptyRegion(format!(
                    "seed vertex {s} is not inside the slab"
                )));
            }
            &comp_tris[comp_of_vertex[s]]
        }
        None => comp_tris
            .iter()
            .filter(|c| !c.is_empty())
            .max_by_key(|c| (c.len(), std::cmp::Reverse(c.iter().min().copied())))
            .expect("kept is non-empty"),
    };
    let mut tris = chosen.clone();
    tris.sort_unstable();
    Ok(submesh(mesh, &tris))
}

/// Copies the listed triangles into a standalone mesh, renumbering vertices
/// in ascending parent order.
fn submesh(parent: &SurfaceMesh, triangles: &[usize]) -> SurfaceMesh {
    let n = parent.vertices.len();
    let mut new_id = vec![usize::MAX; n];
    let mut order: Vec<usize> = Vec::new();
    for &t in triangles {
        for &v in &parent.triangles[t] {
            if new_id[v] == usize::MAX {
                new_id[v] = 0;
                order.push(v);
            }
        }
    }
    order.sort_unstable();
    for (i, &v) in order.iter().enumerate() {
        new_id[v] = i;
    }
    let tris: Vec<[usize; 3]> = triangles
        .iter()
        .map(|&t| {
            let [a, b, c] = parent.triangles[t];
            [new_id[a], new_id[b], new_id[c]]
        })
        .collect();
    let pick3 = |src: &Vec<[f64; 3]>| order.iter().map(|&v| src[v]).collect();
    let loops = boundary_loops(order.len(), &tris);
    SurfaceMesh {
        vertices: pick3(&parent.vertices),
        param_coords: order.iter().map(|&v| parent.param_coords[v]).collect(),
        normal: pick3(&parent.normal),
        gauss_curvature: order.iter().map(|&v| parent.gauss_curvature[v]).collect(),
        norm_a2: order.iter().map(|&v| parent.norm_a2[v]).collect(),
        triangles: tris,
        boundary_loops: loops,
        involution: None,
        meta: parent.meta.clone(),
    }
}
