//! Meshed models of the classical minimal surfaces, with curvature carried
//! analytically rather than fitted from the triangulation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

mod families;
mod io;
mod regions;

pub use families::{build_mesh, classical_surface, Family, WeierstrassData};
pub use io::{read_mesh, write_mesh};
pub use regions::{extrinsic_slab, geodesic_ball, geodesic_distances, puncture, GeodesicBall};

#[derive(Debug, thiserror::Error)]
pub enum SurfaceError {
    #[error("parameter `{0}` is not accepted by family `{1}`")]
    UnknownParameter(String, String),
    #[error("family `{1}` requires parameter `{0}`")]
    MissingParameter(String, String),
    #[error("parameter `{name}` = {value} outside {range}")]
    ParameterRange {
        name: String,
        value: f64,
        range: String,
    },
    #[error("bad domain: {0}")]
    BadDomain(String),
    #[error("domain touches a pole of the height differential at ({0}, {1})")]
    DomainTouchesPole(f64, f64),
    #[error("vertex index {0} out of range (mesh has {1} vertices)")]
    VertexOutOfRange(usize, usize),
    #[error("selection is empty: {0}")]
    EmptyRegion(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse: {0}")]
    Parse(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainShape {
    Disk,
    Annulus,
    Rectangle,
}

/// Region of the conformal parameter plane to be triangulated.
///
/// `bounds` is read per shape: disk `[radius]`, annulus `[r_in, r_out]`,
/// rectangle `[u0, u1, v0, v1]`. `resolution` counts grid steps in the
/// radial/first and angular/second directions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamDomain {
    pub shape: DomainShape,
    pub bounds: Vec<f64>,
    pub resolution: (u32, u32),
}

impl ParamDomain {
    pub fn disk(radius: f64, resolution: (u32, u32)) -> Result<Self, SurfaceError> {
        let d = ParamDomain {
            shape: DomainShape::Disk,
            bounds: vec![radius],
            resolution,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn annulus(r_in: f64, r_out: f64, resolution: (u32, u32)) -> Result<Self, SurfaceError> {
        let d = ParamDomain {
            shape: DomainShape::Annulus,
            bounds: vec![r_in, r_out],
            resolution,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn rectangle(
        u: (f64, f64),
        v: (f64, f64),
        resolution: (u32, u32),
    ) -> Result<Self, SurfaceError> {
        let d = ParamDomain {
            shape: DomainShape::Rectangle,
            bounds: vec![u.0, u.1, v.0, v.1],
            resolution,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), SurfaceError> {
        let expect = match self.shape {
            DomainShape::Disk => 1,
            DomainShape::Annulus => 2,
            DomainShape::Rectangle => 4,
        };
        if self.bounds.len() != expect {
            return Err(SurfaceError::BadDomain(format!(
                "{:?} takes {} bounds, got {}",
                self.shape,
                expect,
                self.bounds.len()
            )));
        }
        if self.bounds.iter().any(|b| !b.is_finite()) {
            return Err(SurfaceError::BadDomain("non-finite bound".into()));
        }
        match self.shape {
            DomainShape::Disk => {
                if self.bounds[0] <= 0.0 {
                    return Err(SurfaceError::BadDomain("disk radius must be positive".into()));
                }
            }
            DomainShape::Annulus => {
                if self.bounds[0] <= 0.0 || self.bounds[0] >= self.bounds[1] {
                    return Err(SurfaceError::BadDomain(
                        "annulus needs 0 < r_in < r_out".into(),
                    ));
                }
            }
            DomainShape::Rectangle => {
                if self.bounds[0] >= self.bounds[1] || self.bounds[2] >= self.bounds[3] {
                    return Err(SurfaceError::BadDomain(
                        "rectangle bounds must be strictly ordered".into(),
                    ));
                }
            }
        }
        if self.resolution.0 < 4 || self.resolution.1 < 4 {
            return Err(SurfaceError::BadDomain(format!(
                "resolution {:?} too coarse, need at least 4 steps each way",
                self.resolution
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshMeta {
    pub family: String,
    pub params: BTreeMap<String, f64>,
    pub resolution: (u32, u32),
}

/// Triangulated surface patch. Curvatures are evaluated from the closed-form
/// expressions of the generating family, never estimated from the triangles,
/// so refining the mesh changes quadrature accuracy only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    pub param_coords: Vec<[f64; 2]>,
    pub normal: Vec<[f64; 3]>,
    #[serde(rename = "K")]
    pub gauss_curvature: Vec<f64>,
    #[serde(rename = "normA2")]
    pub norm_a2: Vec<f64>,
    pub boundary_loops: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub involution: Option<Vec<usize>>,
    pub meta: MeshMeta,
}

impl SurfaceMesh {
    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        triangle_area(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    /// Total area of the triangulation.
    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Rebuilds `boundary_loops` from the triangle list.
    pub fn recompute_boundary(&mut self) {
        self.boundary_loops = boundary_loops(self.vertices.len(), &self.triangles);
    }
}

pub(crate) fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn norm(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn triangle_area(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    0.5 * norm(cross(sub(b, a), sub(c, a)))
}

/// Directed boundary edges chained into closed vertex cycles. Every edge
/// lying in exactly one triangle shows up in exactly one cycle.
pub(crate) fn boundary_loops(n_vertices: usize, triangles: &[[usize; 3]]) -> Vec<Vec<usize>> {
    use std::collections::HashMap;
    let mut count: HashMap<(usize, usize), u32> = HashMap::new();
    for t in triangles {
        for e in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            let key = (e.0.min(e.1), e.0.max(e.1));
            *count.entry(key).or_insert(0) += 1;
        }
    }
    // A boundary edge keeps the orientation induced by its unique triangle.
    let mut next: HashMap<usize, usize> = HashMap::new();
    for t in triangles {
        for e in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            let key = (e.0.min(e.1), e.0.max(e.1));
            if count[&key] == 1 {
                next.insert(e.0, e.1);
            }
        }
    }
    let mut loops = Vec::new();
    let mut seen = vec![false; n_vertices];
    let mut starts: Vec<usize> = next.keys().copied().collect();
    starts.sort_unstable();
    for start in starts {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut v = start;
        loop {
            cycle.push(v);
            seen[v] = true;
            v = next[&v];
            if v == start {
                break;
            }
        }
        loops.push(cycle);
    }
    loops
}

/// Quadrature rule used by [`total_curvature`], recorded in report output.
pub const QUADRATURE_RULE: &str = "triangle area times mean of vertex curvatures";

/// Integral of the Gauss curvature over the mesh, second order accurate in
/// the grid spacing. Triangles are summed in index order, so the result is
/// reproducible bit for bit.
pub fn total_curvature(mesh: &SurfaceMesh) -> f64 {
    let mut total = 0.0;
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let k = (mesh.gauss_curvature[tri[0]]
            + mesh.gauss_curvature[tri[1]]
            + mesh.gauss_curvature[tri[2]])
            / 3.0;
        total += mesh.triangle_area(t) * k;
    }
    total
}

/// Structural checks on a mesh. Returns one message per violation; an empty
/// vector means the mesh is internally consistent.
pub fn mesh_diagnostics(mesh: &SurfaceMesh) -> Vec<String> {
    let mut out = Vec::new();
    let n = mesh.vertices.len();
    for (name, len) in [
        ("param_coords", mesh.param_coords.len()),
        ("normal", mesh.normal.len()),
        ("K", mesh.gauss_curvature.len()),
        ("normA2", mesh.norm_a2.len()),
    ] {
        if len != n {
            out.push(format!("{name} has {len} entries for {n} vertices"));
        }
    }
    for (t, tri) in mesh.triangles.iter().enumerate() {
        if tri.iter().any(|&v| v >= n) {
            out.push(format!("triangle {t} references a missing vertex"));
        } else if mesh.triangle_area(t) <= 0.0 {
            out.push(format!("triangle {t} has vanishing area"));
        }
    }
    for (i, nrm) in mesh.normal.iter().enumerate() {
        if (norm(*nrm) - 1.0).abs() > 1e-12 {
            out.push(format!("normal at vertex {i} is not unit length"));
        }
    }
    for i in 0..n.min(mesh.gauss_curvature.len()).min(mesh.norm_a2.len()) {
        if (mesh.norm_a2[i] + 2.0 * mesh.gauss_curvature[i]).abs() > 1e-10 {
            out.push(format!("|A|^2 and -2K disagree at vertex {i}"));
        }
    }
    let expected = boundary_loops(n, &mesh.triangles);
    let mut have: Vec<Vec<usize>> = mesh.boundary_loops.clone();
    let mut want = expected;
    let canon = |l: &mut Vec<Vec<usize>>| {
        for c in l.iter_mut() {
            let pivot = c
                .iter()
                .enumerate()
                .min_by_key(|(_, v)| **v)
                .map(|(i, _)| i)
                .unwrap_or(0);
            c.rotate_left(pivot);
        }
        l.sort();
    };
    canon(&mut have);
    canon(&mut want);
    if have != want {
        out.push("boundary_loops do not match the triangle incidence".into());
    }
    if let Some(inv) = &mesh.involution {
        if inv.len() != n {
            out.push("involution length mismatch".into());
        } else {
            for (i, &j) in inv.iter().enumerate() {
                if j >= n || inv[j] != i {
                    out.push(format!("involution is not an order two pairing at {i}"));
                    break;
                }
                if j == i {
                    out.push(format!("involution fixes vertex {i}"));
                    break;
                }
            }
            use std::collections::HashSet;
            let tris: HashSet<[usize; 3]> = mesh
                .triangles
                .iter()
                .map(|t| {
                    let mut s = *t;
                    s.sort_unstable();
                    s
                })
                .collect();
            for t in &mesh.triangles {
                let mut im = [inv[t[0]], inv[t[1]], inv[t[2]]];
                im.sort_unstable();
                if !tris.contains(&im) {
                    out.push("involution does not permute the triangles".into());
                    break;
                }
            }
        }
    }
    out
}
