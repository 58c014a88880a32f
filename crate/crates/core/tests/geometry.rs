use std::f64::consts::PI;

use epw::geometry::*;
use epw::specfun::{spherical_harmonic, ModalIndex};
use epw::waves::{Point3, Wavenumber};
use epw::EpwError;

fn norm(p: &Point3) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
}

fn angles(x: &Point3) -> (f64, f64) {
    let r = norm(x);
    ((x[2] / r).clamp(-1.0, 1.0).acos(), x[1].atan2(x[0]).rem_euclid(2.0 * PI))
}

fn nn_distances(nodes: &[Point3]) -> Vec<f64> {
    nodes
        .iter()
        .enumerate()
        .map(|(i, p)| {
            nodes
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| norm(&[p[0] - q[0], p[1] - q[1], p[2] - q[2]]))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

fn cv(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean
}

#[test]
fn sphere_weights_sum_to_area() {
    for s in [1, 7, 100, 2000] {
        let bs = sphere_boundary(s).unwrap();
        assert_eq!(bs.len(), s);
        assert!((bs.total_weight() - 4.0 * PI).abs() < 1e-12);
        assert!(bs.nodes.iter().all(|p| (norm(p) - 1.0).abs() < 1e-14));
    }
}

#[test]
fn sphere_cubature_integrates_harmonics() {
    let bs = sphere_boundary(2000).unwrap();
    let idx = ModalIndex::new(3, 2).unwrap();
    let mut mean = num_complex::Complex64::new(0.0, 0.0);
    let mut sq = 0.0;
    for (x, w) in bs.nodes.iter().zip(&bs.weights) {
        let (t, p) = angles(x);
        let y = spherical_harmonic(idx, t, p);
        mean += y * *w;
        sq += y.norm_sqr() * w;
    }
    assert!(mean.norm() < 1e-3, "{mean}");
    assert!((sq - 1.0).abs() < 1e-3, "{sq}");
}

#[test]
fn large_sphere_sampling_is_fast() {
    let t = std::time::Instant::now();
    let bs = sphere_boundary(12544).unwrap();
    assert_eq!(bs.len(), 12544);
    assert!(t.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn cube_sampling_layout() {
    for s in [6, 7, 100, 601] {
        let bs = cube_boundary(s).unwrap();
        assert_eq!(bs.len(), s);
        assert!((bs.total_weight() - 8.0).abs() < 1e-12);
        for p in &bs.nodes {
            let m = p.iter().fold(0.0f64, |a, c| a.max(c.abs()));
            assert!((m - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        }
    }
    let bs = cube_boundary(600).unwrap();
    assert!(cv(&nn_distances(&bs.nodes)) < 0.5);
    assert!(matches!(cube_boundary(5), Err(EpwError::Domain(_))));
}

#[test]
fn domain_dispatch_matches_area() {
    for dom in [Domain::ball(), Domain::cube(), Domain::from_mesh(icosphere(1)).unwrap()] {
        let bs = dom.boundary(500).unwrap();
        let area = dom.surface_area().unwrap();
        assert!((bs.total_weight() - area).abs() < 1e-12 * area);
    }
}

#[test]
fn octahedron_ingestion() {
    let dom = Domain::from_mesh(octahedron()).unwrap();
    assert!((dom.scale - 1.0).abs() < 1e-15);
    let topo = dom.mesh.as_ref().unwrap().topology();
    assert!(topo.is_closed());
    assert_eq!(topo.euler_characteristic, 2);

    let mut open = octahedron();
    open.faces.pop();
    assert!(matches!(Domain::from_mesh(open), Err(EpwError::NotClosed(_))));
}

#[test]
fn icosphere_area() {
    let m = icosphere(2);
    assert_eq!(m.faces.len(), 320);
    assert!(m.validate_closed().is_ok());
    assert!((m.area() / (4.0 * PI) - 1.0).abs() < 0.02);
}

#[test]
fn torus_has_genus_one() {
    let t = torus(1.0, 0.3, 24, 12);
    let topo = t.validate_closed().unwrap();
    assert_eq!(topo.euler_characteristic, 0);
    assert_eq!(topo.genus(), Some(1));
}

#[test]
fn rescale_is_idempotent() {
    let mut m = torus(3.0, 1.0, 16, 8);
    let s1 = m.normalize_to_unit_sphere().unwrap();
    assert!((s1 - 0.25).abs() < 1e-12);
    let before = m.vertices.clone();
    let s2 = m.normalize_to_unit_sphere().unwrap();
    assert!((s2 - 1.0).abs() < 1e-12);
    for (a, b) in before.iter().zip(&m.vertices) {
        assert!(norm(&[a[0] - b[0], a[1] - b[1], a[2] - b[2]]) < 1e-14);
    }
    let rmax = m.vertices.iter().map(norm).fold(0.0, f64::max);
    assert!((rmax - 1.0).abs() < 1e-12);
}

#[test]
fn area_proportional_allocation() {
    assert_eq!(allocate_counts(&[0.5, 0.5], 8), vec![4, 4]);
    assert_eq!(allocate_counts(&[0.9, 0.1], 10), vec![9, 1]);
    let c = allocate_counts(&[1.0, 2.0, 3.0, 0.5], 37);
    assert_eq!(c.iter().sum::<usize>(), 37);

    let square = TriMesh::new(
        vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]],
        vec![[0, 1, 2], [0, 2, 3]],
    )
    .unwrap();
    let (nodes, weights, counts) = mesh_sampling(&square, 8);
    assert_eq!(counts, vec![4, 4]);
    assert_eq!(nodes.len(), 8);
    assert!((weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);

    let skew = TriMesh::new(
        vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.9, 1.0, 0.0], [0.0, 1.0, 0.0]],
        vec![[0, 1, 2], [0, 2, 3]],
    )
    .unwrap();
    let a = skew.face_areas();
    assert!((a[0] / a[1] - 1.0).abs() < 0.2);
    let skew9 = TriMesh::new(
        vec![[0.0, 0.0, 0.0], [9.0, 0.0, 0.0], [9.0, 1.0, 0.0], [0.0, 1.0, 0.0], [10.0, 0.0, 0.0]],
        vec![[0, 1, 3], [1, 4, 2]],
    )
    .unwrap();
    let (_, _, counts) = mesh_sampling(&skew9, 10);
    assert_eq!(counts, vec![9, 1]);
}

#[test]
fn mesh_points_lie_on_their_faces() {
    let tri = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
    for n in [1, 2, 3, 5, 9, 10] {
        let pts = triangle_points(tri, n);
        assert_eq!(pts.len(), n);
        for p in &pts {
            assert!(p[0] > 0.0 && p[1] > 0.0 && p[0] + p[1] < 1.0 && p[2] == 0.0);
        }
    }
}

#[test]
fn icosphere_sampling_density_is_uniform() {
    let m = icosphere(2);
    let (nodes, weights, counts) = mesh_sampling(&m, 5000);
    assert_eq!(nodes.len(), 5000);
    assert!((weights.iter().sum::<f64>() - m.area()).abs() < 1e-12 * m.area());
    let dens: Vec<f64> = counts.iter().zip(m.face_areas()).map(|(c, a)| *c as f64 / a).collect();
    assert!(cv(&dens) < 0.3, "{}", cv(&dens));
}

#[test]
fn fundamental_solution_values() {
    let k = Wavenumber::new(5.0).unwrap();
    let src = SourcePoint { s: [0.0; 3], offset: 0.0 };
    let v = fundamental_solution(&[1.0, 0.0, 0.0], &src, k).unwrap();
    let expect = num_complex::Complex64::from_polar(1.0 / (4.0 * PI), 5.0);
    assert!((v - expect).norm() < 1e-15);
    let far = fundamental_solution(&[0.0, 2.0, 0.0], &src, k).unwrap();
    assert!((far.norm() - 1.0 / (8.0 * PI)).abs() < 1e-15);
    assert!(matches!(fundamental_solution(&[0.0; 3], &src, k), Err(EpwError::Singular(_))));
}

#[test]
fn fundamental_solution_solves_helmholtz() {
    let k = Wavenumber::new(5.0).unwrap();
    let src = place_source(&Domain::cube(), [1.0, 0.0, 0.0], SourcePreset::Third.wavelengths(), k).unwrap();
    let h = 1e-2;
    for x in [[0.1, 0.2, -0.3], [0.5, -0.5, 0.5], [-0.4, 0.0, 0.1]] {
        let u = |p: Point3| fundamental_solution(&p, &src, k).unwrap();
        let mut lap = num_complex::Complex64::new(0.0, 0.0);
        for d in 0..3 {
            let at = |t: f64| {
                let mut p = x;
                p[d] += t * h;
                u(p)
            };
            lap += (-at(2.0) + at(1.0) * 16.0 - at(0.0) * 30.0 + at(-1.0) * 16.0 - at(-2.0)) / (12.0 * h * h);
        }
        let r = (lap + u(x) * 25.0).norm() / (25.0 * u(x).norm());
        assert!(r < 1e-5, "{r}");
    }
}

#[test]
fn source_placement() {
    let k = Wavenumber::new(5.0).unwrap();
    let lam = k.wavelength();
    let cube = Domain::cube();
    let src = place_source(&cube, [1.0, 0.0, 0.0], 1.0 / 3.0, k).unwrap();
    assert!((src.s[0] - (1.0 / 3f64.sqrt() + lam / 3.0)).abs() < 1e-15);
    assert!(src.s[1] == 0.0 && src.s[2] == 0.0);
    assert!((src.offset - 1.0 / 3.0).abs() < 1e-12);
    for preset in [SourcePreset::TwoThirds, SourcePreset::Third, SourcePreset::Wavelength] {
        for dom in [Domain::ball(), cube.clone(), Domain::from_mesh(icosphere(1)).unwrap()] {
            let e = [0.3, -0.5, 0.8];
            let s = place_source(&dom, e, preset.wavelengths(), k).unwrap();
            assert!(s.offset >= preset.wavelengths() - 1e-12);
        }
    }
    let bs = cube_boundary(10_000).unwrap();
    for p in &bs.nodes {
        let v = fundamental_solution(p, &src, k).unwrap();
        assert!(v.re.is_finite() && v.im.is_finite());
    }
}

#[test]
fn slices_and_membership() {
    let ball = Domain::ball();
    let pts = ball.coordinate_plane_points(21).unwrap();
    assert!(!pts.is_empty());
    assert!(pts.iter().all(|p| norm(p) <= 1.0));
    let cube = Domain::cube();
    assert_eq!(cube.coordinate_plane_points(11).unwrap().len(), 3 * 121);
    assert!(cube.contains(&[0.5, 0.5, 0.5]).unwrap());
    assert!(!cube.contains(&[0.6, 0.0, 0.0]).unwrap());
    let mesh = Domain::from_mesh(octahedron()).unwrap();
    assert!(mesh.contains(&[0.0; 3]).is_err());
}

#[test]
fn mesh_file_parsing() {
    let off = "OFF\n# octahedron\n6 8 0\n1 0 0\n-1 0 0\n0 1 0\n0 -1 0\n0 0 1\n0 0 -1\n\
        3 0 2 4\n3 2 1 4\n3 1 3 4\n3 3 0 4\n3 2 0 5\n3 1 2 5\n3 3 1 5\n3 0 3 5\n";
    let m = parse_off(off).unwrap();
    assert_eq!(m.faces.len(), 8);
    assert!(m.validate_closed().is_ok());
    let round = parse_off(&m.write_off()).unwrap();
    assert_eq!(round, m);

    let obj = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 1 3 2\nf 1/1 2/2 4/4\nf -4 -1 -2\nf 2 3 4\n";
    let m = parse_obj(obj).unwrap();
    assert_eq!(m.faces.len(), 4);
    assert!(m.validate_closed().is_ok());

    assert!(matches!(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3 4\n"), Err(EpwError::Parse { .. })));
    assert!(matches!(parse_obj("v 0 0\n"), Err(EpwError::Parse { line: 1, .. })));
    assert!(parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n").is_err());
    assert!(matches!(parse_off("PLY\n"), Err(EpwError::Parse { .. })));
}

#[test]
fn mesh_ingest_from_file() {
    let dir = std::env::temp_dir().join(format!("epw-geom-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ico.off");
    let mut m = icosphere(1);
    for v in &mut m.vertices {
        *v = v.map(|c| 3.0 * c + 1.0);
    }
    std::fs::write(&path, m.write_off()).unwrap();
    let dom = Domain::mesh_ingest(&path).unwrap();
    assert!((dom.scale - 1.0 / 3.0).abs() < 1e-12);
    let bs = mesh_boundary(&dom, 300).unwrap();
    assert_eq!(bs.len(), 300);
    assert!(bs.nodes.iter().all(|p| norm(p) <= 1.0 + 1e-12));
    let mut csv = Vec::new();
    write_boundary_csv(&bs, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("x,y,z,w\n"));
    assert_eq!(text.lines().count(), 301);
    std::fs::remove_dir_all(&dir).unwrap();
}
