//! Experiment runners. Each returns typed rows carrying the fit diagnostics
//! (P, S, L, ε, ε-rank, ℰ, ‖ξ‖).

use std::time::Instant;

use epw::geometry::{fundamental_solution, place_source, Domain, DomainKind, Topology, TriMesh};
use epw::sampling::{
    build_epw_set, build_ppw_set, tuning_rules, ApproximationSet, SamplerConfig, SetKind, TruncationParams,
};
use epw::solver::{assemble_matrix, evaluate_expansion, singular_values, BoundarySampling, SvdSolver};
use epw::specfun::ModalIndex;
use epw::waves::{spherical_wave_eval, Point3, SphericalWave, Wavenumber};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{config_err, Result};
use crate::settings::{ExperimentSpec, Normalization};
use crate::target::RandomExpansionTarget;

#[derive(Clone, Debug, Serialize)]
pub struct Report<R> {
    pub rows: Vec<R>,
    pub wall_time: f64,
}

fn default_normalization(domain: &Domain) -> Normalization {
    match domain.kind {
        DomainKind::Ball => Normalization::Density,
        _ => Normalization::Linf,
    }
}

/// Builds a set of `p` waves and applies the requested scaling on `nodes`.
pub fn make_set(
    kind: SetKind,
    kappa: Wavenumber,
    l: usize,
    p: usize,
    cfg: &SamplerConfig,
    norm: Normalization,
    nodes: &[Point3],
) -> Result<ApproximationSet> {
    let mut set = match kind {
        SetKind::Epw => build_epw_set(TruncationParams::new(l, kappa), p, cfg)?,
        SetKind::Ppw => build_ppw_set(p, kappa, cfg)?,
    };
    match norm {
        Normalization::Density => {}
        Normalization::Linf => set.normalize_linf(nodes)?,
        Normalization::None => set.ln_scales.fill(0.0),
    }
    Ok(set)
}

struct Fitting {
    kappa: Wavenumber,
    domain: Domain,
    norm: Normalization,
    cfg: SamplerConfig,
}

impl Fitting {
    fn new(spec: &ExperimentSpec) -> Result<Self> {
        let domain = spec.domain.load()?;
        let norm = spec.normalization.unwrap_or_else(|| default_normalization(&domain));
        Ok(Fitting { kappa: Wavenumber::new(spec.kappa)?, domain, norm, cfg: spec.sampler() })
    }

    /// Boundary sampling, set and ε for P waves, following the tuning rules for
    /// whatever the spec leaves open.
    fn setup(
        &self,
        spec: &ExperimentSpec,
        kind: SetKind,
        l: usize,
        p: usize,
    ) -> Result<(BoundarySampling, ApproximationSet, f64)> {
        let tune = tuning_rules(p, self.kappa);
        let bs = self.domain.boundary(spec.s.unwrap_or(tune.s))?;
        let set = make_set(kind, self.kappa, l, p, &self.cfg, self.norm, &bs.nodes)?;
        Ok((bs, set, spec.epsilon.unwrap_or(tune.epsilon)))
    }
}

fn l_column(kind: SetKind, l: usize) -> Option<usize> {
    (kind == SetKind::Epw).then_some(l)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeRow {
    pub set: SetKind,
    pub ell: usize,
    pub p: usize,
    pub s: usize,
    pub l: Option<usize>,
    pub epsilon: f64,
    pub eps_rank: usize,
    pub residual: f64,
    pub coeff_norm: f64,
}

/// Default set sizes: 16L² EPWs and 4(4κ+1)² PPWs.
fn mode_sizes(spec: &ExperimentSpec, kind: SetKind, l: usize) -> Vec<usize> {
    spec.p.clone().unwrap_or_else(|| match kind {
        SetKind::Epw => vec![16 * l * l],
        SetKind::Ppw => {
            let n = spec.kappa_multiple(4.0) + 1;
            vec![4 * n * n]
        }
    })
}

/// Approximates b_ℓ⁰ for ℓ = 0..=max_ell, one sampling matrix per set and size.
pub fn run_spherical_modes(spec: &ExperimentSpec) -> Result<Report<ModeRow>> {
    let t0 = Instant::now();
    let fit = Fitting::new(spec)?;
    let l = spec.l.unwrap_or(spec.kappa_multiple(4.0));
    let max_ell = spec.max_ell.unwrap_or(spec.kappa_multiple(5.0));
    let mut rows = Vec::new();
    for kind in spec.sets() {
        for p in mode_sizes(spec, kind, l) {
            let (bs, set, eps) = fit.setup(spec, kind, l, p)?;
            let solver = SvdSolver::new(assemble_matrix(&set, &bs)?)?;
            drop(set);
            for ell in 0..=max_ell {
                let sw = SphericalWave::new(ModalIndex::new(ell, 0)?, fit.kappa)?;
                let b = bs.sample(|x| spherical_wave_eval(&sw, x));
                let f = solver.solve(b.view(), eps)?;
                rows.push(ModeRow {
                    set: kind,
                    ell,
                    p,
                    s: bs.len(),
                    l: l_column(kind, l),
                    epsilon: eps,
                    eps_rank: f.eps_rank,
                    residual: f.residual,
                    coeff_norm: f.coeff_norm,
                });
            }
        }
    }
    Ok(Report { rows, wall_time: t0.elapsed().as_secs_f64() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RandomRow {
    pub set: SetKind,
    /// P/N.
    pub ratio: f64,
    pub p: usize,
    pub s: usize,
    pub l: Option<usize>,
    pub epsilon: f64,
    pub eps_rank: usize,
    pub residual: f64,
    pub coeff_norm: f64,
    /// ‖ξ‖ / ‖u‖_𝓑.
    pub coeff_ratio: f64,
}

pub const RANDOM_RATIOS: [f64; 6] = [0.25, 0.5, 1.0, 2.0, 4.0, 10.0];

/// Reconstructs a random expansion of degree L over a sweep of P/N.
pub fn run_random_expansion(spec: &ExperimentSpec) -> Result<Report<RandomRow>> {
    let t0 = Instant::now();
    let fit = Fitting::new(spec)?;
    let l = spec.l.unwrap_or(spec.kappa_multiple(2.0));
    let n = (l + 1) * (l + 1);
    let sizes = spec
        .p
        .clone()
        .unwrap_or_else(|| RANDOM_RATIOS.iter().map(|r| ((r * n as f64).round() as usize).max(1)).collect());
    let target = RandomExpansionTarget::new(l, fit.kappa, spec.seed)?;
    let unorm = target.b_norm();
    let mut rows = Vec::new();
    for kind in spec.sets() {
        for &p in &sizes {
            let (bs, set, eps) = fit.setup(spec, kind, l, p)?;
            let b = bs.sample(|x| target.eval(x));
            let solver = SvdSolver::new(assemble_matrix(&set, &bs)?)?;
            let f = solver.solve(b.view(), eps)?;
            rows.push(RandomRow {
                set: kind,
                ratio: p as f64 / n as f64,
                p,
                s: bs.len(),
                l: l_column(kind, l),
                epsilon: eps,
                eps_rank: f.eps_rank,
                residual: f.residual,
                coeff_norm: f.coeff_norm,
                coeff_ratio: f.coeff_norm / unorm,
            });
        }
    }
    Ok(Report { rows, wall_time: t0.elapsed().as_secs_f64() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FundamentalRow {
    pub set: SetKind,
    pub p: usize,
    pub s: usize,
    pub l: Option<usize>,
    pub epsilon: f64,
    pub eps_rank: usize,
    pub residual: f64,
    pub coeff_norm: f64,
    /// max |u_N − Φ| / max |Φ| on the boundary nodes.
    pub boundary_error: f64,
    /// Same ratio on coordinate-plane slices (ball and cube only).
    pub slice_error: Option<f64>,
    /// λ (3P/4π)^{1/3}.
    pub dofs_per_wavelength: f64,
}

pub const FUNDAMENTAL_SIZES: [usize; 6] = [64, 256, 576, 1024, 1600, 2704];
pub const SLICE_GRID: usize = 31;

fn max_rel_error(approx: &[Complex64], exact: &[Complex64]) -> f64 {
    let scale = exact.iter().map(|v| v.norm()).fold(0.0, f64::max);
    approx.iter().zip(exact).map(|(a, e)| (a - e).norm()).fold(0.0, f64::max) / scale
}

/// Reconstructs the field of an exterior point source over a sweep of P.
pub fn run_fundamental(spec: &ExperimentSpec) -> Result<Report<FundamentalRow>> {
    let t0 = Instant::now();
    let fit = Fitting::new(spec)?;
    let src = place_source(&fit.domain, [1.0, 0.0, 0.0], spec.offset, fit.kappa)?;
    let phi = |x: &Point3| fundamental_solution(x, &src, fit.kappa).expect("source lies outside the domain");
    let sizes = spec.p.clone().unwrap_or_else(|| {
        let n = if spec.quick { 4 } else { FUNDAMENTAL_SIZES.len() };
        FUNDAMENTAL_SIZES[..n].to_vec()
    });
    let slices = match fit.domain.kind {
        DomainKind::Mesh => None,
        _ => Some(fit.domain.coordinate_plane_points(SLICE_GRID)?),
    };
    let slice_exact: Option<Vec<Complex64>> = slices.as_ref().map(|pts| pts.iter().map(phi).collect());
    let mut rows = Vec::new();
    for kind in spec.sets() {
        for &p in &sizes {
            let l = spec.l.unwrap_or(tuning_rules(p, fit.kappa).l);
            let (bs, set, eps) = fit.setup(spec, kind, l, p)?;
            let b = bs.sample(phi);
            let f = SvdSolver::new(assemble_matrix(&set, &bs)?)?.solve(b.view(), eps)?;
            let on_bdry = evaluate_expansion(&set, &f.xi, &bs.nodes)?;
            let exact: Vec<Complex64> = bs.nodes.iter().map(phi).collect();
            let slice_error = match (&slices, &slice_exact) {
                (Some(pts), Some(ex)) => Some(max_rel_error(&evaluate_expansion(&set, &f.xi, pts)?, ex)),
                _ => None,
            };
            rows.push(FundamentalRow {
                set: kind,
                p,
                s: bs.len(),
                l: l_column(kind, l),
                epsilon: eps,
                eps_rank: f.eps_rank,
                residual: f.residual,
                coeff_norm: f.coeff_norm,
                boundary_error: max_rel_error(&on_bdry, &exact),
                slice_error,
                dofs_per_wavelength: dofs_per_wavelength(p, fit.kappa),
            });
        }
    }
    Ok(Report { rows, wall_time: t0.elapsed().as_secs_f64() })
}

pub fn dofs_per_wavelength(p: usize, kappa: Wavenumber) -> f64 {
    kappa.wavelength() * (3.0 * p as f64 / (4.0 * std::f64::consts::PI)).cbrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankRow {
    pub set: SetKind,
    pub p: usize,
    pub s: usize,
    pub l: Option<usize>,
    pub epsilon: f64,
    pub eps_rank: usize,
    pub sigma_max: f64,
    pub sigma_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaRow {
    pub set: SetKind,
    pub p: usize,
    pub index: usize,
    pub sigma: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub ranks: Vec<RankRow>,
    pub spectrum: Vec<SigmaRow>,
    pub wall_time: f64,
}

/// Singular values of the sampling matrices over a sweep of P (default
/// {2, 4, 8, 16}·L² with L = 4κ).
pub fn run_svd_spectrum(spec: &ExperimentSpec) -> Result<SpectrumReport> {
    let t0 = Instant::now();
    let fit = Fitting::new(spec)?;
    let l = spec.l.unwrap_or(spec.kappa_multiple(4.0));
    let sizes = spec.p.clone().unwrap_or_else(|| [2, 4, 8, 16].map(|m| m * l * l).to_vec());
    let (mut ranks, mut spectrum) = (Vec::new(), Vec::new());
    for kind in spec.sets() {
        for &p in &sizes {
            let (bs, set, eps) = fit.setup(spec, kind, l, p)?;
            let sigma = singular_values(assemble_matrix(&set, &bs)?)?;
            let eps_rank = epw::solver::epsilon_rank(&sigma, eps)?;
            ranks.push(RankRow {
                set: kind,
                p,
                s: bs.len(),
                l: l_column(kind, l),
                epsilon: eps,
                eps_rank,
                sigma_max: sigma[0],
                sigma_min: *sigma.last().expect("nonempty spectrum"),
            });
            spectrum.extend(sigma.iter().enumerate().map(|(index, &sigma)| SigmaRow { set: kind, p, index, sigma }));
        }
    }
    Ok(SpectrumReport { ranks, spectrum, wall_time: t0.elapsed().as_secs_f64() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WaveRow {
    pub theta1: f64,
    pub theta2: f64,
    pub psi: f64,
    pub zeta: f64,
    pub ln_scale: f64,
}

/// Dumps one approximation set. Without `p`, L = ⌈4κ⌉ and P = 10(L+1)².
pub fn sample_set(spec: &ExperimentSpec) -> Result<(ApproximationSet, Vec<WaveRow>)> {
    let fit = Fitting::new(spec)?;
    let kind = spec.set.unwrap_or(SetKind::Epw);
    let (l, p) = match spec.p.as_deref() {
        Some([p]) => (spec.l.unwrap_or(tuning_rules(*p, fit.kappa).l), *p),
        Some(_) => return config_err("sample-set takes a single p"),
        None => {
            let l = spec.l.unwrap_or(spec.kappa_multiple(4.0));
            (l, 10 * (l + 1) * (l + 1))
        }
    };
    let (_, set, _) = fit.setup(spec, kind, l, p)?;
    let rows = set
        .params
        .iter()
        .zip(&set.ln_scales)
        .map(|(y, &ln_scale)| WaveRow { theta1: y.theta1, theta2: y.theta2, psi: y.psi, zeta: y.zeta, ln_scale })
        .collect();
    Ok((set, rows))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeshInfo {
    pub vertices: usize,
    pub faces: usize,
    pub edges: usize,
    pub boundary_edges: usize,
    pub nonmanifold_edges: usize,
    pub consistently_oriented: bool,
    pub euler_characteristic: i64,
    pub genus: Option<i64>,
    pub closed: bool,
    /// Area before rescaling.
    pub area: f64,
    /// Rescaling factor into the unit ball, when the mesh is closed.
    pub scale: Option<f64>,
}

pub fn mesh_info(mesh: &TriMesh) -> MeshInfo {
    let t: Topology = mesh.topology();
    let scale = Domain::from_mesh(mesh.clone()).ok().map(|d| d.scale);
    MeshInfo {
        vertices: t.vertices,
        faces: t.faces,
        edges: t.edges,
        boundary_edges: t.boundary_edges,
        nonmanifold_edges: t.nonmanifold_edges,
        consistently_oriented: t.consistently_oriented,
        euler_characteristic: t.euler_characteristic,
        genus: t.genus(),
        closed: t.is_closed(),
        area: mesh.area(),
        scale,
    }
}
