//! The classical families and their closed forms. Positions come from
//! integrating the representing data exactly, so curvature fields are exact
//! values of the smooth surface sampled at grid points.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{
    boundary_loops, DomainShape, MeshMeta, ParamDomain, SurfaceError, SurfaceMesh,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Plane,
    Catenoid,
    Enneper,
    Helicoid,
    ScherkDoublyPeriodic,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Plane => "plane",
            Family::Catenoid => "catenoid",
            Family::Enneper => "enneper",
            Family::Helicoid => "helicoid",
            Family::ScherkDoublyPeriodic => "scherk_doubly_periodic",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "plane" => Some(Family::Plane),
            "catenoid" => Some(Family::Catenoid),
            "enneper" => Some(Family::Enneper),
            "helicoid" => Some(Family::Helicoid),
            "scherk_doubly_periodic" => Some(Family::ScherkDoublyPeriodic),
            _ => None,
        }
    }
}

/// Representing data for one surface: the family, its parameters, the default
/// parameter region, and the defining pair as printable formulas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeierstrassData {
    pub family: Family,
    pub parameters: BTreeMap<String, f64>,
    pub domain: ParamDomain,
    pub gauss_map: String,
    pub height_differential: String,
}

impl WeierstrassData {
    /// Poles of the height differential in the parameter plane, as (re, im).
    /// The build step refuses any domain that reaches one of these.
    pub fn poles(&self) -> Vec<[f64; 2]> {
        match self.family {
            Family::Plane | Family::Enneper => Vec::new(),
            Family::Catenoid | Family::Helicoid => vec![[0.0, 0.0]],
            Family::ScherkDoublyPeriodic => {
                let half = self.parameters["theta"] / 2.0;
                let (s, c) = half.sin_cos();
                vec![[c, s], [c, -s], [-c, s], [-c, -s]]
            }
        }
    }
}

fn reject_unknown(
    family: Family,
    params: &BTreeMap<String, f64>,
    accepted: &[&str],
) -> Result<(), SurfaceError> {
    for key in params.keys() {
        if !accepted.contains(&key.as_str()) {
            return Err(SurfaceError::UnknownParameter(
                key.clone(),
                family.name().to_string(),
            ));
        }
    }
    Ok(())
}

/// Representing data for a named classical surface.
///
/// Default domains follow one rule: truncate where the remaining tail of the
/// total curvature is below half a percent, or at one period for the
/// periodic families.
pub fn classical_surface(
    family: Family,
    params: &BTreeMap<String, f64>,
) -> Result<WeierstrassData, SurfaceError> {
    let (domain, gauss_map, height_differential) = match family {
        Family::Plane => {
            reject_unknown(family, params, &[])?;
            (ParamDomain::disk(1.0, (32, 96))?, "0", "dz".to_string())
        }
        Family::Catenoid => {
            reject_unknown(family, params, &[])?;
            (
                ParamDomain::annulus((-3.0f64).exp(), 3.0f64.exp(), (48, 96))?,
                "z",
                "dz/z^2".to_string(),
            )
        }
        Family::Enneper => {
            reject_unknown(family, params, &[])?;
            // Radius keeps the curvature tail under half a percent; the
            // linear radial grid then needs depth to resolve the center peak.
            (ParamDomain::disk(15.0, (256, 96))?, "z", "dz".to_string())
        }
        Family::Helicoid => {
            reject_unknown(family, params, &[])?;
            (
                ParamDomain::rectangle((-3.0, 3.0), (0.0, 2.0 * PI), (48, 96))?,
                "z",
                "i dz/z^2".to_string(),
            )
        }
        Family::ScherkDoublyPeriodic => {
            reject_unknown(family, params, &["theta"])?;
            let theta = *params.get("theta").ok_or_else(|| {
                SurfaceError::MissingParameter("theta".into(), family.name().into())
            })?;
            if !(theta > 0.0 && theta <= PI / 2.0 + 1e-15) {
                return Err(SurfaceError::ParameterRange {
                    name: "theta".into(),
                    value: theta,
                    range: "(0, pi/2]".into(),
                });
            }
            (
                ParamDomain::disk(0.99, (64, 96))?,
                "z",
                format!("i dz / (z^4 - 2 cos({theta}) z^2 + 1)"),
            )
        }
    };
    Ok(WeierstrassData {
        family,
        parameters: params.clone(),
        domain,
        gauss_map: gauss_map.to_string(),
        height_differential,
    })
}

/// Unit normal read off the stereographic value of the Gauss map.
fn sphere_normal(g: Complex64) -> [f64; 3] {
    let n2 = g.norm_sqr();
    let d = 1.0 + n2;
    [2.0 * g.re / d, 2.0 * g.im / d, (n2 - 1.0) / d]
}

struct Sample {
    position: [f64; 3],
    normal: [f64; 3],
    param: [f64; 2],
    k: f64,
    a2: f64,
}

/// Disk grid: a center vertex plus concentric rings, fan plus quad strips.
fn disk_grid(radius: f64, res: (u32, u32)) -> (Vec<[f64; 2]>, Vec<[usize; 3]>) {
    let (nr, na) = (res.0 as usize, res.1 as usize);
    let mut pts = vec![[0.0, 0.0]];
    for k in 1..=nr {
        let r = radius * k as f64 / nr as f64;
        for j in 0..na {
            let ang = 2.0 * PI * j as f64 / na as f64;
            pts.push([r * ang.cos(), r * ang.sin()]);
        }
    }
    let ring = |k: usize, j: usize| 1 + (k - 1) * na + j % na;
    let mut tris = Vec::new();
    for j in 0..na {
        tris.push([0, ring(1, j), ring(1, j + 1)]);
    }
    for k in 1..nr {
        for j in 0..na {
            let (a, b) = (ring(k, j), ring(k, j + 1));
            let (c, d) = (ring(k + 1, j), ring(k + 1, j + 1));
            tris.push([a, c, d]);
            tris.push([a, d, b]);
        }
    }
    (pts, tris)
}

/// Annulus grid, radially log spaced so rows are even in the conformal
/// coordinate, columns wrapping around.
fn annulus_grid(r_in: f64, r_out: f64, res: (u32, u32)) -> (Vec<[f64; 2]>, Vec<[usize; 3]>) {
    let (nr, na) = (res.0 as usize, res.1 as usize);
    let (u0, u1) = (r_in.ln(), r_out.ln());
    let mut pts = Vec::new();
    for k in 0..=nr {
        let u = u0 + (u1 - u0) * k as f64 / nr as f64;
        for j in 0..na {
            let v = 2.0 * PI * j as f64 / na as f64;
            pts.push([u, v]);
        }
    }
    let at = |k: usize, j: usize| k * na + j % na;
    let mut tris = Vec::new();
    for k in 0..nr {
        for j in 0..na {
            let (a, b) = (at(k, j), at(k, j + 1));
            let (c, d) = (at(k + 1, j), at(k + 1, j + 1));
            tris.push([a, c, d]);
            tris.push([a, d, b]);
        }
    }
    (pts, tris)
}

fn rectangle_grid(
    u: (f64, f64),
    v: (f64, f64),
    res: (u32, u32),
) -> (Vec<[f64; 2]>, Vec<[usize; 3]>) {
    let (nu, nv) = (res.0 as usize, res.1 as usize);
    let mut pts = Vec::new();
    for i in 0..=nu {
        let uu = u.0 + (u.1 - u.0) * i as f64 / nu as f64;
        for j in 0..=nv {
            let vv = v.0 + (v.1 - v.0) * j as f64 / nv as f64;
            pts.push([uu, vv]);
        }
    }
    let at = |i: usize, j: usize| i * (nv + 1) + j;
    let mut tris = Vec::new();
    for i in 0..nu {
        for j in 0..nv {
            let (a, b) = (at(i, j), at(i, j + 1));
            let (c, d) = (at(i + 1, j), at(i + 1, j + 1));
            tris.push([a, c, d]);
            tris.push([a, d, b]);
        }
    }
    (pts, tris)
}

fn plane_sample(p: [f64; 2]) -> Sample {
    Sample {
        position: [p[0], p[1], 0.0],
        normal: [0.0, 0.0, 1.0],
        param: p,
        k: 0.0,
        a2: 0.0,
    }
}

/// Catenoid with unit neck: z = e^{u+iv}, positions
/// (-cosh u cos v, -cosh u sin v, u), curvature -1/cosh^4 u.
fn catenoid_sample(uv: [f64; 2]) -> Sample {
    let (u, v) = (uv[0], uv[1]);
    let (su, cu) = (u.sinh(), u.cosh());
    let (sv, cv) = v.sin_cos();
    let sech = 1.0 / cu;
    let k = -sech.powi(4);
    Sample {
        position: [-cu * cv, -cu * sv, u],
        normal: [sech * cv, sech * sv, su * sech],
        param: [u.exp() * cv, u.exp() * sv],
        k,
        a2: -2.0 * k,
    }
}

/// Helicoid conjugate to the unit catenoid; shares its Gauss map and
/// curvature, positions (sinh u sin v, -sinh u cos v, -v).
fn helicoid_sample(uv: [f64; 2]) -> Sample {
    let (u, v) = (uv[0], uv[1]);
    let (su, cu) = (u.sinh(), u.cosh());
    let (sv, cv) = v.sin_cos();
    let sech = 1.0 / cu;
    let k = -sech.powi(4);
    Sample {
        position: [su * sv, -su * cv, -v],
        normal: [sech * cv, sech * sv, su * sech],
        param: uv,
        k,
        a2: -2.0 * k,
    }
}

/// Enneper on the full scale: position (Re(z - z^3/3), Re(i(z + z^3/3)),
/// Re z^2), curvature -4/(1+|z|^2)^4, so |A|^2 peaks at 8 in the center.
fn enneper_sample(p: [f64; 2]) -> Sample {
    let z = Complex64::new(p[0], p[1]);
    let z3 = z * z * z / 3.0;
    let i = Complex64::i();
    let den = 1.0 + z.norm_sqr();
    let k = -4.0 / den.powi(4);
    Sample {
        position: [(z - z3).re, (i * (z + z3)).re, (z * z).re],
        normal: sphere_normal(z),
        param: p,
        k,
        a2: -2.0 * k,
    }
}

/// One fundamental piece of the doubly periodic Scherk family. The height
/// differential has four unit circle poles; the position integrals come out
/// as log terms via partial fractions, single valued on the unit disk.
struct ScherkForms {
    roots: [Complex64; 4],
    coeffs: [[Complex64; 4]; 3],
    two_cos: f64,
}

impl ScherkForms {
    fn new(theta: f64) -> Self {
        let a = Complex64::from_polar(1.0, theta / 2.0);
        let roots = [a, -a, a.conj(), -a.conj()];
        let i = Complex64::i();
        let two_cos = 2.0 * theta.cos();
        let mut coeffs = [[Complex64::new(0.0, 0.0); 4]; 3];
        for (idx, &p) in roots.iter().enumerate() {
            let dprime = 4.0 * p * p * p - two_cos * 2.0 * p;
            coeffs[0][idx] = i * 0.5 * (1.0 - p * p) / dprime;
            coeffs[1][idx] = -(1.0 + p * p) / (2.0 * dprime);
            coeffs[2][idx] = i * p / dprime;
        }
        ScherkForms {
            roots,
            coeffs,
            two_cos,
        }
    }

    fn sample(&self, p: [f64; 2]) -> Sample {
        let z = Complex64::new(p[0], p[1]);
        let mut position = [0.0; 3];
        for axis in 0..3 {
            let mut phi = Complex64::new(0.0, 0.0);
            for (idx, &root) in self.roots.iter().enumerate() {
                phi += self.coeffs[axis][idx] * (1.0 - z / root).ln();
            }
            position[axis] = phi.re;
        }
        let z2 = z * z;
        let dval = (z2 * z2 - self.two_cos * z2 + 1.0).norm();
        let den = 1.0 + z.norm_sqr();
        let k = -16.0 * dval * dval / den.powi(4);
        Sample {
            position,
            normal: sphere_normal(z),
            param: p,
            k,
            a2: -2.0 * k,
        }
    }
}

fn shape_error(family: Family, domain: &ParamDomain) -> SurfaceError {
    SurfaceError::BadDomain(format!(
        "family `{}` does not take a {:?} domain",
        family.name(),
        domain.shape
    ))
}

/// Triangulates the surface over `domain`. Curvature and normals are filled
/// from the family's closed forms at each grid point.
pub fn build_mesh(
    data: &WeierstrassData,
    domain: &ParamDomain,
) -> Result<SurfaceMesh, SurfaceError> {
    domain.validate()?;
    let (triangles, samples): (Vec<[usize; 3]>, Vec<Sample>) = match data.family {
        Family::Plane => {
            let (grid, tris) = match domain.shape {
                DomainShape::Disk => disk_grid(domain.bounds[0], domain.resolution),
                DomainShape::Rectangle => rectangle_grid(
                    (domain.bounds[0], domain.bounds[1]),
                    (domain.bounds[2], domain.bounds[3]),
                    domain.resolution,
                ),
                // Flat annulus: grid rows are log radial, positions come
                // from the conformal coordinate itself.
                DomainShape::Annulus => {
                    let (grid, tris) =
                        annulus_grid(domain.bounds[0], domain.bounds[1], domain.resolution);
                    let flat: Vec<[f64; 2]> = grid
                        .iter()
                        .map(|&[u, v]| [u.exp() * v.cos(), u.exp() * v.sin()])
                        .collect();
                    (flat, tris)
                }
            };
            (tris, grid.iter().map(|&p| plane_sample(p)).collect())
        }
        Family::Catenoid => {
            if domain.shape != DomainShape::Annulus {
                return Err(shape_error(data.family, domain));
            }
            let (grid, tris) =
                annulus_grid(domain.bounds[0], domain.bounds[1], domain.resolution);
            (tris, grid.iter().map(|&p| catenoid_sample(p)).collect())
        }
        Family::Helicoid => {
            if domain.shape != DomainShape::Rectangle {
                return Err(shape_error(data.family, domain));
            }
            let (grid, tris) = rectangle_grid(
                (domain.bounds[0], domain.bounds[1]),
                (domain.bounds[2], domain.bounds[3]),
                domain.resolution,
            );
            (tris, grid.iter().map(|&p| helicoid_sample(p)).collect())
        }
        Family::Enneper => {
            if domain.shape != DomainShape::Disk {
                return Err(shape_error(data.family, domain));
            }
            let (grid, tris) = disk_grid(domain.bounds[0], domain.resolution);
            (tris, grid.iter().map(|&p| enneper_sample(p)).collect())
        }
        Family::ScherkDoublyPeriodic => {
            if domain.shape != DomainShape::Disk {
                return Err(shape_error(data.family, domain));
            }
            if domain.bounds[0] >= 1.0 {
                let pole = data.poles()[0];
                return Err(SurfaceError::DomainTouchesPole(pole[0], pole[1]));
            }
            let forms = ScherkForms::new(data.parameters["theta"]);
            let (grid, tris) = disk_grid(domain.bounds[0], domain.resolution);
            (tris, grid.iter().map(|&p| forms.sample(p)).collect())
        }
    };
    let n = samples.len();
    let mut mesh = SurfaceMesh {
        vertices: Vec::with_capacity(n),
        triangles,
        param_coords: Vec::with_capacity(n),
        normal: Vec::with_capacity(n),
        gauss_curvature: Vec::with_capacity(n),
        norm_a2: Vec::with_capacity(n),
        boundary_loops: Vec::new(),
        involution: None,
        meta: MeshMeta {
            family: data.family.name().to_string(),
            params: data.parameters.clone(),
            resolution: domain.resolution,
        },
    };
    for s in samples {
        mesh.vertices.push(s.position);
        mesh.param_coords.push(s.param);
        mesh.normal.push(s.normal);
        mesh.gauss_curvature.push(s.k);
        mesh.norm_a2.push(s.a2);
    }
    mesh.boundary_loops = boundary_loops(n, &mesh.triangles);
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_params() -> BTreeMap<String, f64> {
        BTreeMap::new()
    }

    #[test]
    fn scherk_right_angle_has_symmetric_unit_poles() {
        let mut p = BTreeMap::new();
        p.insert("theta".to_string(), PI / 2.0);
        let data = classical_surface(Family::ScherkDoublyPeriodic, &p).unwrap();
        let poles = data.poles();
        assert_eq!(poles.len(), 4);
        let r = (0.5f64).sqrt();
        let want = [[r, r], [r, -r], [-r, r], [-r, -r]];
        for w in want {
            assert!(
                poles
                    .iter()
                    .any(|p| (p[0] - w[0]).abs() < 1e-12 && (p[1] - w[1]).abs() < 1e-12),
                "missing pole {w:?}"
            );
        }
    }

    #[test]
    fn scherk_requires_theta_in_range() {
        assert!(matches!(
            classical_surface(Family::ScherkDoublyPeriodic, &no_params()),
            Err(SurfaceError::MissingParameter(..))
        ));
        let mut p = BTreeMap::new();
        p.insert("theta".to_string(), 2.0);
        assert!(matches!(
            classical_surface(Family::ScherkDoublyPeriodic, &p),
            Err(SurfaceError::ParameterRange { .. })
        ));
    }

    #[test]
    fn unknown_parameters_are_rejected() {
        let mut p = BTreeMap::new();
        p.insert("twist".to_string(), 1.0);
        assert!(matches!(
            classical_surface(Family::Catenoid, &p),
            Err(SurfaceError::UnknownParameter(..))
        ));
    }

    #[test]
    fn catenoid_default_domain_avoids_the_puncture() {
        let data = classical_surface(Family::Catenoid, &no_params()).unwrap();
        assert_eq!(data.domain.shape, DomainShape::Annulus);
        assert!(data.domain.bounds[0] > 0.0);
        assert_eq!(data.poles(), vec![[0.0, 0.0]]);
    }

    #[test]
    fn plane_mesh_is_flat_and_closed_form() {
        let data = classical_surface(Family::Plane, &no_params()).unwrap();
        let mesh = build_mesh(&data, &data.domain).unwrap();
        assert!(mesh.gauss_curvature.iter().all(|&k| k == 0.0));
        assert!(mesh.norm_a2.iter().all(|&a| a == 0.0));
        assert_eq!(mesh.boundary_loops.len(), 1);
    }

    #[test]
    fn scherk_domain_must_stay_inside_the_unit_disk() {
        let mut p = BTreeMap::new();
        p.insert("theta".to_string(), PI / 2.0);
        let data = classical_surface(Family::ScherkDoublyPeriodic, &p).unwrap();
        let too_big = ParamDomain::disk(1.0, (8, 16)).unwrap();
        assert!(matches!(
            build_mesh(&data, &too_big),
            Err(SurfaceError::DomainTouchesPole(..))
        ));
    }

    #[test]
    fn plane_accepts_an_annulus_domain() {
        let data = classical_surface(Family::Plane, &no_params()).unwrap();
        let ring = ParamDomain::annulus(0.5, 2.0, (8, 48)).unwrap();
        let mesh = build_mesh(&data, &ring).unwrap();
        assert_eq!(mesh.boundary_loops.len(), 2);
        assert!(mesh.gauss_curvature.iter().all(|&k| k == 0.0));
        for v in &mesh.vertices {
            let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
            assert_eq!(v[2], 0.0);
            assert!((0.5 - 1e-12..=2.0 + 1e-12).contains(&r));
        }
    }

    #[test]
    fn wrong_shape_for_family_is_refused() {
        let data = classical_surface(Family::Catenoid, &no_params()).unwrap();
        let disk = ParamDomain::disk(1.0, (8, 16)).unwrap();
        assert!(matches!(
            build_mesh(&data, &disk),
            Err(SurfaceError::BadDomain(_))
        ));
    }

    #[test]
    fn grids_have_expected_counts() {
        let (pts, tris) = disk_grid(1.0, (4, 8));
        assert_eq!(pts.len(), 1 + 4 * 8);
        assert_eq!(tris.len(), 8 + 3 * 16);
        let (pts, tris) = annulus_grid(0.5, 2.0, (4, 8));
        assert_eq!(pts.len(), 5 * 8);
        assert_eq!(tris.len(), 4 * 16);
        let (pts, tris) = rectangle_grid((0.0, 1.0), (0.0, 1.0), (4, 4));
        assert_eq!(pts.len(), 25);
        assert_eq!(tris.len(), 32);
    }
}
