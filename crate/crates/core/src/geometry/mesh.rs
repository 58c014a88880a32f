//! Closed triangle meshes: OFF/OBJ ingestion, validation, rescaling and
//! area-proportional boundary sampling.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{EpwError, Result};
use crate::waves::Point3;

fn sub(a: &Point3, b: &Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: &Point3, b: &Point3) -> Point3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn len(a: &Point3) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriMesh {
    pub vertices: Vec<Point3>,
    pub faces: Vec<[usize; 3]>,
}

/// Topological summary of a mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub boundary_edges: usize,
    pub nonmanifold_edges: usize,
    pub consistently_oriented: bool,
    pub euler_characteristic: i64,
}

impl Topology {
    pub fn is_closed(&self) -> bool {
        self.boundary_edges == 0 && self.nonmanifold_edges == 0
    }

    /// Genus of a closed orientable surface, when χ is even.
    pub fn genus(&self) -> Option<i64> {
        (self.is_closed() && self.euler_characteristic % 2 == 0).then(|| (2 - self.euler_characteristic) / 2)
    }
}

impl TriMesh {
    pub fn new(vertices: Vec<Point3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        for (i, f) in faces.iter().enumerate() {
            if f.iter().any(|&v| v >= vertices.len()) {
                return Err(EpwError::Parse { line: 0, msg: format!("face {i} references a missing vertex") });
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(EpwError::Parse { line: 0, msg: format!("face {i} repeats a vertex") });
            }
        }
        Ok(TriMesh { vertices, faces })
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.faces[f].map(|i| self.vertices[i]);
        0.5 * len(&cross(&sub(&b, &a), &sub(&c, &a)))
    }

    pub fn face_areas(&self) -> Vec<f64> {
        (0..self.faces.len()).map(|f| self.face_area(f)).collect()
    }

    pub fn area(&self) -> f64 {
        self.face_areas().iter().sum()
    }

    pub fn topology(&self) -> Topology {
        let mut undirected: HashMap<(usize, usize), usize> = HashMap::new();
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        let mut used = vec![false; self.vertices.len()];
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                used[a] = true;
                *undirected.entry((a.min(b), a.max(b))).or_default() += 1;
                *directed.entry((a, b)).or_default() += 1;
            }
        }
        let v = used.iter().filter(|u| **u).count();
        let e = undirected.len();
        Topology {
            vertices: v,
            edges: e,
            faces: self.faces.len(),
            boundary_edges: undirected.values().filter(|c| **c == 1).count(),
            nonmanifold_edges: undirected.values().filter(|c| **c > 2).count(),
            consistently_oriented: directed.values().all(|c| *c == 1),
            euler_characteristic: v as i64 - e as i64 + self.faces.len() as i64,
        }
    }

    /// Fails unless every edge is shared by exactly two faces and χ is even.
    pub fn validate_closed(&self) -> Result<Topology> {
        let t = self.topology();
        if t.boundary_edges > 0 {
            return Err(EpwError::NotClosed(format!("{} boundary edges", t.boundary_edges)));
        }
        if t.nonmanifold_edges > 0 {
            return Err(EpwError::NotClosed(format!("{} edges shared by more than two faces", t.nonmanifold_edges)));
        }
        if t.euler_characteristic % 2 != 0 {
            return Err(EpwError::NotClosed(format!("odd Euler characteristic {}", t.euler_characteristic)));
        }
        Ok(t)
    }

    /// Centers the bounding box at the origin and scales so the farthest vertex
    /// lies on the unit sphere. Returns the scale factor applied.
    pub fn normalize_to_unit_sphere(&mut self) -> Result<f64> {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for v in &self.vertices {
            for d in 0..3 {
                lo[d] = lo[d].min(v[d]);
                hi[d] = hi[d].max(v[d]);
            }
        }
        let c = [0, 1, 2].map(|d| 0.5 * (lo[d] + hi[d]));
        let r = self.vertices.iter().map(|v| len(&sub(v, &c))).fold(0.0, f64::max);
        if !(r > 0.0) || !r.is_finite() {
            return Err(EpwError::Domain("mesh has no spatial extent".into()));
        }
        let s = 1.0 / r;
        for v in &mut self.vertices {
            *v = [0, 1, 2].map(|d| (v[d] - c[d]) * s);
        }
        Ok(s)
    }

    pub fn write_off(&self) -> String {
        let mut s = format!("OFF\n{} {} 0\n", self.vertices.len(), self.faces.len());
        for v in &self.vertices {
            s.push_str(&format!("{:.17} {:.17} {:.17}\n", v[0], v[1], v[2]));
        }
        for f in &self.faces {
            s.push_str(&format!("3 {} {} {}\n", f[0], f[1], f[2]));
        }
        s
    }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>().map_err(|e| EpwError::Parse { line, msg: format!("{tok:?}: {e}") })
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>().map_err(|e| EpwError::Parse { line, msg: format!("{tok:?}: {e}") })
}

pub fn parse_off(text: &str) -> Result<TriMesh> {
    let mut tokens: Vec<(usize, &str)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        tokens.extend(line.split_whitespace().map(|t| (i + 1, t)));
    }
    let mut it = tokens.into_iter().peekable();
    match it.next() {
        Some((_, "OFF")) => {}
        Some((l, t)) => return Err(EpwError::Parse { line: l, msg: format!("expected OFF header, found {t:?}") }),
        None => return Err(EpwError::Parse { line: 1, msg: "empty file".into() }),
    }
    let mut next = |what: &str| {
        it.next().ok_or_else(|| EpwError::Parse { line: 0, msg: format!("unexpected end of file reading {what}") })
    };
    let (l, t) = next("vertex count")?;
    let nv = parse_usize(t, l)?;
    let (l, t) = next("face count")?;
    let nf = parse_usize(t, l)?;
    let (l, t) = next("edge count")?;
    parse_usize(t, l)?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let mut v = [0.0; 3];
        for c in &mut v {
            let (l, t) = next("vertex")?;
            *c = parse_f64(t, l)?;
        }
        vertices.push(v);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (l, t) = next("face")?;
        let k = parse_usize(t, l)?;
        if k != 3 {
            return Err(EpwError::Parse { line: l, msg: format!("only triangles are supported, found a {k}-gon") });
        }
        let mut f = [0usize; 3];
        for c in &mut f {
            let (l, t) = next("face index")?;
            *c = parse_usize(t, l)?;
        }
        faces.push(f);
    }
    TriMesh::new(vertices, faces)
}

pub fn parse_obj(text: &str) -> Result<TriMesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut toks = raw.split('#').next().unwrap_or("").split_whitespace();
        match toks.next() {
            Some("v") => {
                let vals = toks.take(3).map(|t| parse_f64(t, line)).collect::<Result<Vec<_>>>()?;
                if vals.len() != 3 {
                    return Err(EpwError::Parse { line, msg: "vertex needs three coordinates".into() });
                }
                vertices.push([vals[0], vals[1], vals[2]]);
            }
            Some("f") => {
                let idx = toks
                    .map(|t| {
                        let head = t.split('/').next().unwrap_or("");
                        let v: i64 = head.parse().map_err(|e| EpwError::Parse { line, msg: format!("{t:?}: {e}") })?;
                        let n = vertices.len() as i64;
                        let k = if v < 0 { n + v } else { v - 1 };
                        if k < 0 || k >= n {
                            return Err(EpwError::Parse { line, msg: format!("vertex index {v} out of range") });
                        }
                        Ok(k as usize)
                    })
                    .collect::<Result<Vec<_>>>()?;
                if idx.len() != 3 {
                    return Err(EpwError::Parse {
                        line,
                        msg: format!("only triangles are supported, found a {}-gon", idx.len()),
                    });
                }
                faces.push([idx[0], idx[1], idx[2]]);
            }
            _ => {}
        }
    }
    TriMesh::new(vertices, faces)
}

/// Reads an OFF or OBJ file, chosen by extension (OFF header sniffed otherwise).
pub fn read_mesh(path: &Path) -> Result<TriMesh> {
    let text = std::fs::read_to_string(path)?;
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("obj") => parse_obj(&text),
        Some("off") => parse_off(&text),
        _ if text.trim_start().starts_with("OFF") => parse_off(&text),
        _ => parse_obj(&text),
    }
}

pub fn octahedron() -> TriMesh {
    let vertices = vec![
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let faces = vec![[0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4], [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5]];
    TriMesh { vertices, faces }
}

/// Icosahedron refined `level` times by edge midpoints projected to the sphere (20·4^level faces).
pub fn icosphere(level: usize) -> TriMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Point3> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|v| v.map(|c| c / len(v)))
    .collect();
    let mut faces = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let m = [0, 1, 2].map(|k| {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    let p = [0, 1, 2].map(|d| 0.5 * (vertices[a][d] + vertices[b][d]));
                    let n = len(&p);
                    vertices.push(p.map(|c| c / n));
                    vertices.len() - 1
                })
            });
            next.push([f[0], m[0], m[2]]);
            next.push([f[1], m[1], m[0]]);
            next.push([f[2], m[2], m[1]]);
            next.push(m);
        }
        faces = next;
    }
    TriMesh { vertices, faces }
}

/// Torus with radii `major` > `minor`, sampled on an nu × nv parameter grid.
pub fn torus(major: f64, minor: f64, nu: usize, nv: usize) -> TriMesh {
    let mut vertices = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = 2.0 * PI * i as f64 / nu as f64;
        for j in 0..nv {
            let v = 2.0 * PI * j as f64 / nv as f64;
            let r = major + minor * v.cos();
            vertices.push([r * u.cos(), r * u.sin(), minor * v.sin()]);
        }
    }
    let id = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut faces = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    TriMesh { vertices, faces }
}

/// Splits `total` among faces proportionally to area (largest remainders).
pub fn allocate_counts(areas: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = areas.iter().sum();
    let quotas: Vec<f64> = areas.iter().map(|a| a / sum * total as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let missing = total - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..areas.len()).collect();
    order.sort_by(|&a, &b| (quotas[b] - quotas[b].floor()).total_cmp(&(quotas[a] - quotas[a].floor())).then(a.cmp(&b)));
    for &f in order.iter().take(missing) {
        counts[f] += 1;
    }
    counts
}

/// Barycentric coordinates (b1, b2) of the k² subtriangle centroids of an order-k refinement.
fn refinement_centroids(k: usize) -> Vec<(f64, f64)> {
    let kf = k as f64;
    let mut out = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k - i {
            out.push(((i as f64 + 1.0 / 3.0) / kf, (j as f64 + 1.0 / 3.0) / kf));
            if i + j + 1 < k {
                out.push(((i as f64 + 2.0 / 3.0) / kf, (j as f64 + 2.0 / 3.0) / kf));
            }
        }
    }
    out
}

/// `count` well-spread points in one triangle: refinement centroids thinned by
/// farthest-point selection, seeded at the centroid nearest the triangle centroid.
pub fn triangle_points(tri: [Point3; 3], count: usize) -> Vec<Point3> {
    if count == 0 {
        return Vec::new();
    }
    let mut k = 1;
    while k * k < count {
        k += 1;
    }
    let cand: Vec<Point3> = refinement_centroids(k)
        .into_iter()
        .map(|(b1, b2)| [0, 1, 2].map(|d| tri[0][d] + b1 * (tri[1][d] - tri[0][d]) + b2 * (tri[2][d] - tri[0][d])))
        .collect();
    if cand.len() == count {
        return cand;
    }
    let g = [0, 1, 2].map(|d| (tri[0][d] + tri[1][d] + tri[2][d]) / 3.0);
    let first = (0..cand.len())
        .min_by(|&a, &b| len(&sub(&cand[a], &g)).total_cmp(&len(&sub(&cand[b], &g))))
        .unwrap_or(0);
    let mut dist: Vec<f64> = cand.iter().map(|c| len(&sub(c, &cand[first]))).collect();
    let mut chosen = vec![first];
    while chosen.len() < count {
        let far = (0..cand.len()).max_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(b.cmp(&a))).unwrap_or(0);
        chosen.push(far);
        for (d, c) in dist.iter_mut().zip(&cand) {
            *d = d.min(len(&sub(c, &cand[far])));
        }
    }
    chosen.sort_unstable();
    chosen.into_iter().map(|i| cand[i]).collect()
}

/// Nodes and weights on a mesh surface: counts proportional to face area, each
/// point weighted by its face's area share. Weights are rescaled so they sum to
/// the total area even when tiny faces receive no point.
pub fn mesh_sampling(mesh: &TriMesh, total: usize) -> (Vec<Point3>, Vec<f64>, Vec<usize>) {
    let areas = mesh.face_areas();
    let counts = allocate_counts(&areas, total);
    let per_face: Vec<Vec<Point3>> = mesh
        .faces
        .par_iter()
        .zip(&counts)
        .map(|(f, &c)| triangle_points(f.map(|i| mesh.vertices[i]), c))
        .collect();
    let covered: f64 = areas.iter().zip(&counts).filter(|(_, c)| **c > 0).map(|(a, _)| a).sum();
    let fix = areas.iter().sum::<f64>() / covered;
    let mut nodes = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    for ((pts, a), c) in per_face.into_iter().zip(&areas).zip(&counts) {
        for p in pts {
            nodes.push(p);
            weights.push(a / *c as f64 * fix);
        }
    }
    (nodes, weights, counts)
}
