//! Boundary nodes and weights for the unit ball, the inscribed cube and closed
//! triangle meshes, plus fundamental-solution targets.

mod mesh;

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain_err, EpwError, Result};
use crate::sampling::sphere_directions;
use crate::solver::BoundarySampling;
use crate::waves::{Point3, Wavenumber};

pub use mesh::{
    allocate_counts, icosphere, mesh_sampling, octahedron, parse_obj, parse_off, read_mesh, torus,
    triangle_points, Topology, TriMesh,
};

/// Half side of the cube inscribed in the unit sphere.
pub const CUBE_HALF: f64 = 0.577_350_269_189_625_8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    Ball,
    Cube,
    Mesh,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub kind: DomainKind,
    pub mesh: Option<TriMesh>,
    /// Factor applied on ingestion so that the unit sphere circumscribes the domain.
    pub scale: f64,
}

fn dot(a: &Point3, b: &Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn dist(a: &Point3, b: &Point3) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    dot(&d, &d).sqrt()
}

/// Closest point to `p` on triangle (a, b, c).
fn closest_on_triangle(p: &Point3, a: &Point3, b: &Point3, c: &Point3) -> Point3 {
    let sub = |u: &Point3, v: &Point3| [u[0] - v[0], u[1] - v[1], u[2] - v[2]];
    let lerp = |u: &Point3, v: &Point3, t: f64| [0, 1, 2].map(|d| u[d] + t * (v[d] - u[d]));
    let (ab, ac, ap) = (sub(b, a), sub(c, a), sub(p, a));
    let (d1, d2) = (dot(&ab, &ap), dot(&ac, &ap));
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = sub(p, b);
    let (d3, d4) = (dot(&ab, &bp), dot(&ac, &bp));
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return lerp(a, b, d1 / (d1 - d3));
    }
    let cp = sub(p, c);
    let (d5, d6) = (dot(&ab, &cp), dot(&ac, &cp));
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return lerp(a, c, d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return lerp(b, c, (d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    let (v, w) = (vb * denom, vc * denom);
    [0, 1, 2].map(|d| a[d] + ab[d] * v + ac[d] * w)
}

impl Domain {
    pub fn ball() -> Self {
        Domain { kind: DomainKind::Ball, mesh: None, scale: 1.0 }
    }

    pub fn cube() -> Self {
        Domain { kind: DomainKind::Cube, mesh: None, scale: 1.0 }
    }

    /// Validates closure and rescales so the unit sphere circumscribes the mesh.
    pub fn from_mesh(mut mesh: TriMesh) -> Result<Self> {
        mesh.validate_closed()?;
        let scale = mesh.normalize_to_unit_sphere()?;
        Ok(Domain { kind: DomainKind::Mesh, mesh: Some(mesh), scale })
    }

    pub fn mesh_ingest(path: &Path) -> Result<Self> {
        Self::from_mesh(read_mesh(path)?)
    }

    fn mesh_ref(&self) -> Result<&TriMesh> {
        self.mesh.as_ref().ok_or_else(|| EpwError::Domain("mesh domain without a mesh".into()))
    }

    pub fn surface_area(&self) -> Result<f64> {
        Ok(match self.kind {
            DomainKind::Ball => 4.0 * PI,
            DomainKind::Cube => 24.0 * CUBE_HALF * CUBE_HALF,
            DomainKind::Mesh => self.mesh_ref()?.area(),
        })
    }

    pub fn boundary(&self, count: usize) -> Result<BoundarySampling> {
        match self.kind {
            DomainKind::Ball => sphere_boundary(count),
            DomainKind::Cube => cube_boundary(count),
            DomainKind::Mesh => mesh_boundary(self, count),
        }
    }

    /// max over the domain of x·e for a unit vector e.
    pub fn support(&self, e: &Point3) -> Result<f64> {
        Ok(match self.kind {
            DomainKind::Ball => 1.0,
            DomainKind::Cube => CUBE_HALF * (e[0].abs() + e[1].abs() + e[2].abs()),
            DomainKind::Mesh => self.mesh_ref()?.vertices.iter().map(|v| dot(v, e)).fold(f64::NEG_INFINITY, f64::max),
        })
    }

    /// Distance from an exterior point to the domain (0 inside ball or cube).
    pub fn distance_to(&self, s: &Point3) -> Result<f64> {
        Ok(match self.kind {
            DomainKind::Ball => (dot(s, s).sqrt() - 1.0).max(0.0),
            DomainKind::Cube => s.iter().map(|c| (c.abs() - CUBE_HALF).max(0.0).powi(2)).sum::<f64>().sqrt(),
            DomainKind::Mesh => {
                let m = self.mesh_ref()?;
                m.faces
                    .iter()
                    .map(|f| {
                        let [a, b, c] = f.map(|i| m.vertices[i]);
                        dist(s, &closest_on_triangle(s, &a, &b, &c))
                    })
                    .fold(f64::INFINITY, f64::min)
            }
        })
    }

    /// Membership for the ball and the cube; meshes are not supported.
    pub fn contains(&self, x: &Point3) -> Result<bool> {
        match self.kind {
            DomainKind::Ball => Ok(dot(x, x) <= 1.0),
            DomainKind::Cube => Ok(x.iter().all(|c| c.abs() <= CUBE_HALF)),
            DomainKind::Mesh => domain_err("point membership is only available for the ball and the cube"),
        }
    }

    /// n×n grids on the planes x = 0, y = 0, z = 0, restricted to the domain.
    pub fn coordinate_plane_points(&self, n: usize) -> Result<Vec<Point3>> {
        let r = match self.kind {
            DomainKind::Ball => 1.0,
            DomainKind::Cube => CUBE_HALF,
            DomainKind::Mesh => return domain_err("slices are only available for the ball and the cube"),
        };
        let t = |i: usize| if n == 1 { 0.0 } else { -r + 2.0 * r * i as f64 / (n - 1) as f64 };
        let mut out = Vec::new();
        for axis in 0..3 {
            for i in 0..n {
                for j in 0..n {
                    let mut p = [0.0; 3];
                    p[(axis + 1) % 3] = t(i);
                    p[(axis + 2) % 3] = t(j);
                    if self.contains(&p)? {
                        out.push(p);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Fibonacci nodes on the unit sphere with weights 4π/S.
pub fn sphere_boundary(count: usize) -> Result<BoundarySampling> {
    let sys = sphere_directions(count)?;
    BoundarySampling::new(sys.points(), sys.weights)
}

/// Near-equispaced nodes on the six faces of the inscribed cube, equal weights 8/S.
/// Each face holds rows of evenly spaced points, offset half a cell from the edges.
pub fn cube_boundary(count: usize) -> Result<BoundarySampling> {
    if count < 6 {
        return domain_err(format!("cube sampling needs at least 6 points, got {count}"));
    }
    let side = 2.0 * CUBE_HALF;
    let mut nodes = Vec::with_capacity(count);
    for face in 0..6 {
        let n = count / 6 + usize::from(face < count % 6);
        let (axis, sign) = (face / 2, if face % 2 == 0 { 1.0 } else { -1.0 });
        let rows = ((n as f64).sqrt().round() as usize).max(1);
        for i in 0..rows {
            let m = n / rows + usize::from(i < n % rows);
            let v = (i as f64 + 0.5) / rows as f64 * side - CUBE_HALF;
            for j in 0..m {
                let u = (j as f64 + 0.5) / m as f64 * side - CUBE_HALF;
                let mut p = [0.0; 3];
                p[axis] = sign * CUBE_HALF;
                p[(axis + 1) % 3] = u;
                p[(axis + 2) % 3] = v;
                nodes.push(p);
            }
        }
    }
    let w = 6.0 * side * side / count as f64;
    BoundarySampling::new(nodes, vec![w; count])
}

pub fn mesh_boundary(dom: &Domain, count: usize) -> Result<BoundarySampling> {
    if dom.kind != DomainKind::Mesh {
        return domain_err("mesh_boundary requires a mesh domain");
    }
    if count == 0 {
        return domain_err("mesh sampling needs at least one point");
    }
    let (nodes, weights, _) = mesh_sampling(dom.mesh_ref()?, count);
    BoundarySampling::new(nodes, weights)
}

/// Exterior point source; `offset` is its distance to the domain in wavelengths.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourcePoint {
    pub s: Point3,
    pub offset: f64,
}

/// Source offsets used in the cube and mesh experiments, in wavelengths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourcePreset {
    TwoThirds,
    Third,
    Wavelength,
}

impl SourcePreset {
    pub fn wavelengths(self) -> f64 {
        match self {
            SourcePreset::TwoThirds => 2.0 / 3.0,
            SourcePreset::Third => 1.0 / 3.0,
            SourcePreset::Wavelength => 1.0,
        }
    }
}

/// Places a source along the unit direction `e`, `offset` wavelengths beyond the
/// supporting plane of the domain.
pub fn place_source(dom: &Domain, e: Point3, offset: f64, kappa: Wavenumber) -> Result<SourcePoint> {
    let n = dot(&e, &e).sqrt();
    if !(n > 0.0) || !(offset > 0.0) {
        return domain_err("source direction must be nonzero and offset positive");
    }
    let e = e.map(|c| c / n);
    let r = dom.support(&e)? + offset * kappa.wavelength();
    let s = e.map(|c| c * r);
    let d = dom.distance_to(&s)?;
    Ok(SourcePoint { s, offset: d / kappa.wavelength() })
}

/// Φ(x) = e^{iκ|x−s|} / (4π|x−s|).
pub fn fundamental_solution(x: &Point3, src: &SourcePoint, kappa: Wavenumber) -> Result<Complex64> {
    let r = dist(x, &src.s);
    if r == 0.0 {
        return Err(EpwError::Singular(format!("fundamental solution evaluated at its source {:?}", src.s)));
    }
    Ok(Complex64::from_polar(1.0 / (4.0 * PI * r), kappa.get() * r))
}

/// CSV with header "x,y,z,w".
pub fn write_boundary_csv<W: Write>(bs: &BoundarySampling, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| EpwError::Io(std::io::Error::other(e));
    w.write_record(["x", "y", "z", "w"]).map_err(err)?;
    for (p, wt) in bs.nodes.iter().zip(&bs.weights) {
        w.write_record([p[0], p[1], p[2], *wt].map(|v| format!("{v:e}"))).map_err(err)?;
    }
    w.flush()?;
    Ok(())
}
