//! Christoffel-weighted sampling of the evanescence parameter and assembly of
//! normalized EPW / PPW approximation sets.

mod sobol;
mod sphere;

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain_err, EpwError, Result};
use crate::modal::{alpha_table, log_sum_exp, p_vectors, AlphaMode};
use crate::quad::gauss_legendre;
use crate::specfun::{ln_gamma, ln_upper_gamma_q, LogScaled};
use crate::waves::{EpwParams, PlaneWaveKernel, Point3, Wavenumber};

pub use sobol::{sobol_2d, sobol_points, Sobol, MAX_DIM as SOBOL_MAX_DIM};
pub use sphere::{parse_sphere_system, read_sphere_system, sphere_directions, SphereSystem};

/// Truncation degree L with N = (L+1)².
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationParams {
    pub l: usize,
    pub n: usize,
    pub kappa: Wavenumber,
}

impl TruncationParams {
    pub fn new(l: usize, kappa: Wavenumber) -> Self {
        TruncationParams { l, n: (l + 1) * (l + 1), kappa }
    }
}

/// ln w(ζ) = ½ ln ζ − ζ.
fn ln_weight(zeta: f64) -> f64 {
    0.5 * zeta.ln() - zeta
}

/// The N-term Christoffel function μ_N and the marginal density ρ̂_N.
#[derive(Clone, Debug)]
pub struct Christoffel {
    pub trunc: TruncationParams,
    pub ln_alpha: Vec<f64>,
}

impl Christoffel {
    pub fn new(trunc: TruncationParams, mode: AlphaMode) -> Result<Self> {
        Ok(Christoffel { trunc, ln_alpha: alpha_table(trunc.l, trunc.kappa, mode)? })
    }

    /// ln μ_N^{−1}(ζ) = ln Σ_{ℓ≤L} α_ℓ² |𝐏_ℓ(ζ)|².
    pub fn ln_mu_inv(&self, zeta: f64) -> Result<f64> {
        let ps = p_vectors(self.trunc.l, zeta, self.trunc.kappa)?;
        Ok(log_sum_exp(ps.iter().zip(&self.ln_alpha).map(|(p, a)| 2.0 * (a + p.ln_norm()))))
    }

    /// ρ̂_N(ζ) = 8π² w(ζ) / (N μ_N(ζ)).
    pub fn rho_hat(&self, zeta: f64) -> Result<f64> {
        if zeta == 0.0 {
            self.ln_mu_inv(zeta)?;
            return Ok(0.0);
        }
        let ln = (8.0 * PI * PI / self.trunc.n as f64).ln() + ln_weight(zeta) + self.ln_mu_inv(zeta)?;
        Ok(ln.exp())
    }

    /// Exact cumulative Υ_N(ζ) = ∫₀^ζ ρ̂_N by composite Gauss–Legendre in u = √η.
    /// Meaningful with quadrature-mode α; intended for comparisons only.
    pub fn cumulative_exact(&self, zeta: f64) -> Result<f64> {
        if !(zeta >= 0.0) {
            return domain_err(format!("zeta = {zeta} must be >= 0"));
        }
        let umax = zeta.sqrt();
        let panels = ((umax / 0.25).ceil() as usize).max(1);
        let h = umax / panels as f64;
        let (gx, gw) = gauss_legendre(20);
        let mut s = 0.0;
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for (x, w) in gx.iter().zip(&gw) {
                let u = mid + 0.5 * h * x;
                s += 0.5 * h * w * 2.0 * u * self.rho_hat(u * u)?;
            }
        }
        Ok(s)
    }
}

/// ln μ_N^{−1}(ζ), log-scaled.
pub fn christoffel_mu_inv(zeta: f64, trunc: TruncationParams, mode: AlphaMode) -> Result<LogScaled> {
    Ok(LogScaled::positive(Christoffel::new(trunc, mode)?.ln_mu_inv(zeta)?))
}

pub fn rho_hat(zeta: f64, trunc: TruncationParams) -> Result<f64> {
    Christoffel::new(trunc, AlphaMode::Quadrature)?.rho_hat(zeta)
}

const INVERSION_TOL: f64 = 1e-12;
const BRACKET_LIMIT: f64 = 1e6;

/// Closed-form cumulative Υ̃_N built on the regularized upper incomplete Gamma function.
#[derive(Clone, Debug)]
pub struct CumulativeTilde {
    pub trunc: TruncationParams,
    ln_q0: Vec<f64>,
}

impl CumulativeTilde {
    pub fn new(trunc: TruncationParams) -> Result<Self> {
        let k2 = 2.0 * trunc.kappa.get();
        let ln_q0 = (0..=trunc.l)
            .map(|l| ln_upper_gamma_q(2.0 * l as f64 + 1.5, k2))
            .collect::<Result<_>>()?;
        Ok(CumulativeTilde { trunc, ln_q0 })
    }

    /// Υ̃_N(ζ) = 1 − N^{−1} Σ_ℓ (2ℓ+1) Q(2ℓ+3/2, 2κ+ζ) / Q(2ℓ+3/2, 2κ).
    pub fn eval(&self, zeta: f64) -> Result<f64> {
        if !(zeta >= 0.0) {
            return domain_err(format!("zeta = {zeta} must be >= 0"));
        }
        if zeta == 0.0 {
            return Ok(0.0);
        }
        let x = 2.0 * self.trunc.kappa.get() + zeta;
        let mut tail = 0.0;
        for (l, q0) in self.ln_q0.iter().enumerate() {
            let q = ln_upper_gamma_q(2.0 * l as f64 + 1.5, x)?;
            tail += (2 * l + 1) as f64 * (q - q0).exp();
        }
        Ok((1.0 - tail / self.trunc.n as f64).clamp(0.0, 1.0))
    }

    /// dΥ̃_N/dζ = N^{−1} Σ_ℓ (2ℓ+1) x^{a−1} e^{−x} / (Γ(a) Q(a, 2κ)), x = 2κ+ζ, a = 2ℓ+3/2.
    pub fn density(&self, zeta: f64) -> Result<f64> {
        if !(zeta >= 0.0) {
            return domain_err(format!("zeta = {zeta} must be >= 0"));
        }
        let x = 2.0 * self.trunc.kappa.get() + zeta;
        let terms = self.ln_q0.iter().enumerate().map(|(l, q0)| {
            let a = 2.0 * l as f64 + 1.5;
            ((2 * l + 1) as f64).ln() + (a - 1.0) * x.ln() - x - ln_gamma(a) - q0
        });
        Ok((log_sum_exp(terms) - (self.trunc.n as f64).ln()).exp())
    }

    /// Υ̃_N^{−1}(u) by bisection on [0, ζ_hi], ζ_hi doubled from κ.
    pub fn invert(&self, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return domain_err(format!("u = {u} must lie in [0, 1)"));
        }
        if u == 0.0 {
            return Ok(0.0);
        }
        let mut hi = self.trunc.kappa.get();
        while self.eval(hi)? <= u {
            hi *= 2.0;
            if hi > BRACKET_LIMIT {
                return Err(EpwError::Inversion(format!(
                    "bracket for u = {u} exceeds zeta = {BRACKET_LIMIT:e}"
                )));
            }
        }
        let mut lo = 0.0;
        loop {
            let mid = 0.5 * (lo + hi);
            let f = self.eval(mid)? - u;
            if f.abs() < INVERSION_TOL || hi - lo < INVERSION_TOL * (1.0 + mid) {
                return Ok(mid);
            }
            if f < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
}

pub fn cumulative_tilde(zeta: f64, trunc: TruncationParams) -> Result<f64> {
    CumulativeTilde::new(trunc)?.eval(zeta)
}

pub fn invert_cumulative(u: f64, trunc: TruncationParams) -> Result<f64> {
    CumulativeTilde::new(trunc)?.invert(u)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingStrategy {
    Deterministic,
    QuasiRandom,
    Random,
}

/// Which parameters are drawn from the unit hypercube.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ItsVariant {
    /// Directions from a sphere point system, (ψ, ζ) from [0,1]².
    SphereDirections,
    /// All four parameters from [0,1]⁴ with θ₁ = arccos(1 − 2z).
    Full,
}

/// Source of near-uniform sphere directions: the Fibonacci lattice or a point file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum SpherePoints {
    Fibonacci,
    File(PathBuf),
}

impl From<String> for SpherePoints {
    fn from(s: String) -> Self {
        if s == "fibonacci" {
            SpherePoints::Fibonacci
        } else {
            SpherePoints::File(PathBuf::from(s))
        }
    }
}

impl From<SpherePoints> for String {
    fn from(s: SpherePoints) -> Self {
        s.to_string()
    }
}

impl fmt::Display for SpherePoints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoints::Fibonacci => f.write_str("fibonacci"),
            SpherePoints::File(p) => write!(f, "{}", p.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    pub strategy: SamplingStrategy,
    pub sphere_points: SpherePoints,
    pub seed: u64,
    pub variant: ItsVariant,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            strategy: SamplingStrategy::QuasiRandom,
            sphere_points: SpherePoints::Fibonacci,
            seed: 0,
            variant: ItsVariant::SphereDirections,
        }
    }
}

/// `count` points in [0,1)^dims according to the strategy.
pub fn unit_samples(count: usize, dims: usize, cfg: &SamplerConfig) -> Result<Vec<Vec<f64>>> {
    if dims == 0 || dims > SOBOL_MAX_DIM {
        return domain_err(format!("sample dimension {dims} not in 1..={SOBOL_MAX_DIM}"));
    }
    Ok(match cfg.strategy {
        SamplingStrategy::QuasiRandom => sobol_points(count, dims, cfg.seed)?,
        SamplingStrategy::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..count).map(|_| (0..dims).map(|_| rng.random::<f64>()).collect()).collect()
        }
        SamplingStrategy::Deterministic => {
            // ⌈count^{1/dims}⌉ midpoints per axis, truncated to `count` in lexicographic order
            let mut k = 1usize;
            while k.pow(dims as u32) < count {
                k += 1;
            }
            (0..count)
                .map(|mut i| {
                    let mut p = vec![0.0; dims];
                    for c in p.iter_mut().rev() {
                        *c = ((i % k) as f64 + 0.5) / k as f64;
                        i /= k;
                    }
                    p
                })
                .collect()
        }
    })
}

fn sphere_system(count: usize, cfg: &SamplerConfig) -> Result<SphereSystem> {
    match &cfg.sphere_points {
        SpherePoints::Fibonacci => sphere_directions(count),
        SpherePoints::File(path) => {
            let sys = read_sphere_system(path)?;
            if sys.len() != count {
                return Err(EpwError::Dimension(format!(
                    "{} holds {} directions, {count} requested",
                    path.display(),
                    sys.len()
                )));
            }
            Ok(sys)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetKind {
    Epw,
    Ppw,
}

/// Plane waves φ_p = e^{ln_scales[p]} EW_{params[p]}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApproximationSet {
    pub kind: SetKind,
    pub kappa: Wavenumber,
    pub params: Vec<EpwParams>,
    pub ln_scales: Vec<f64>,
    pub trunc: Option<TruncationParams>,
}

impl ApproximationSet {
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn scales(&self) -> Vec<f64> {
        self.ln_scales.iter().map(|s| s.exp()).collect()
    }

    pub fn kernels(&self) -> Vec<PlaneWaveKernel> {
        self.params.iter().map(|y| PlaneWaveKernel::new(y, self.kappa)).collect()
    }

    /// Rescales every wave to unit maximum modulus over `nodes`.
    pub fn normalize_linf(&mut self, nodes: &[Point3]) -> Result<()> {
        if nodes.is_empty() {
            return domain_err("L-infinity normalization needs at least one node");
        }
        let kernels = self.kernels();
        self.ln_scales = kernels
            .par_iter()
            .map(|k| -nodes.iter().map(|x| k.ln_modulus(x)).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        Ok(())
    }
}

/// EPW set from explicit directions and (ψ, ζ) pairs, scaled by √(μ_N(y_p)/P)
/// with α_ℓ in approximate mode.
pub fn epw_set_from_samples(
    trunc: TruncationParams,
    directions: &[(f64, f64)],
    psi_zeta: &[(f64, f64)],
) -> Result<ApproximationSet> {
    if directions.len() != psi_zeta.len() || directions.is_empty() {
        return Err(EpwError::Dimension(format!(
            "{} directions vs {} evanescence samples",
            directions.len(),
            psi_zeta.len()
        )));
    }
    let ch = Christoffel::new(trunc, AlphaMode::Approx)?;
    let ln_p = (directions.len() as f64).ln();
    let params = directions
        .iter()
        .zip(psi_zeta)
        .map(|(&(t1, t2), &(psi, zeta))| EpwParams::new(t1, t2, psi, zeta))
        .collect::<Result<Vec<_>>>()?;
    let ln_scales = params
        .par_iter()
        .map(|y| Ok(-0.5 * (ch.ln_mu_inv(y.zeta)? + ln_p)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ApproximationSet { kind: SetKind::Epw, kappa: trunc.kappa, params, ln_scales, trunc: Some(trunc) })
}

pub fn build_epw_set(trunc: TruncationParams, count: usize, cfg: &SamplerConfig) -> Result<ApproximationSet> {
    if count == 0 {
        return domain_err("approximation set size must be >= 1");
    }
    let cum = CumulativeTilde::new(trunc)?;
    let two_pi = 2.0 * PI;
    let (directions, pz): (Vec<(f64, f64)>, Vec<(f64, f64)>) = match cfg.variant {
        ItsVariant::SphereDirections => {
            let dirs = sphere_system(count, cfg)?.angles;
            let z = unit_samples(count, 2, cfg)?;
            let pz = z
                .par_iter()
                .map(|z| Ok((two_pi * z[0], cum.invert(z[1])?)))
                .collect::<Result<Vec<_>>>()?;
            (dirs, pz)
        }
        ItsVariant::Full => {
            let z = unit_samples(count, 4, cfg)?;
            let dirs = z.iter().map(|z| ((1.0 - 2.0 * z[0]).acos(), two_pi * z[1])).collect();
            let pz = z
                .par_iter()
                .map(|z| Ok((two_pi * z[2], cum.invert(z[3])?)))
                .collect::<Result<Vec<_>>>()?;
            (dirs, pz)
        }
    };
    epw_set_from_samples(trunc, &directions, &pz)
}

pub fn build_ppw_set(count: usize, kappa: Wavenumber, cfg: &SamplerConfig) -> Result<ApproximationSet> {
    if count == 0 {
        return domain_err("approximation set size must be >= 1");
    }
    let params = sphere_system(count, cfg)?
        .angles
        .iter()
        .map(|&(t1, t2)| EpwParams::ppw(t1, t2))
        .collect::<Result<Vec<_>>>()?;
    let s = -0.5 * (count as f64).ln();
    Ok(ApproximationSet { kind: SetKind::Ppw, kappa, params, ln_scales: vec![s; count], trunc: None })
}

/// Default truncation degree, boundary sample count and regularization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tuning {
    pub l: usize,
    pub s: usize,
    pub epsilon: f64,
}

/// L = max{⌈κ⌉, ⌊√(P/10)⌋}, S = ⌈√(2P)⌉², ε = 1e−14.
pub fn tuning_rules(count: usize, kappa: Wavenumber) -> Tuning {
    let mut root = 0usize;
    while 10 * (root + 1) * (root + 1) <= count {
        root += 1;
    }
    let mut side = 0usize;
    while side * side < 2 * count {
        side += 1;
    }
    Tuning { l: (kappa.get().ceil() as usize).max(root), s: side * side, epsilon: 1e-14 }
}
