//! Modal analysis of evanescent plane waves: generalized Jacobi–Anger
//! coefficients, Herglotz densities and their normalization.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{EpwError, Result};
use crate::quad::gauss_legendre;
use crate::specfun::{
    legendre_p_complex, ln_factorial, ln_gamma, ln_upper_gamma_q, normalized_legendre_ext_table,
    spherical_harmonics_all, wigner_d_all, LogScaled, ModalIndex,
};
use crate::waves::{angles, beta_table, direction, EpwParams, Point3, Wavenumber};

fn i_pow(n: isize) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

pub(crate) fn log_sum_exp(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let mx = v.clone().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return mx;
    }
    mx + v.map(|x| (x - mx).exp()).sum::<f64>().ln()
}

/// 𝐏_ℓ(ζ) with components γ_ℓ^m i^m P_ℓ^m(1 + ζ/2κ), m = −ℓ..=ℓ.
/// The true vector is e^{ln_scale} · entries; entries have max modulus 1.
#[derive(Clone, Debug)]
pub struct PVector {
    pub ell: usize,
    pub ln_scale: f64,
    pub entries: Vec<Complex64>,
}

impl PVector {
    /// Component at order m (may overflow for very large degree).
    pub fn get(&self, m: isize) -> Complex64 {
        self.entries[(m + self.ell as isize) as usize] * self.ln_scale.exp()
    }

    /// ln |𝐏_ℓ(ζ)|.
    pub fn ln_norm(&self) -> f64 {
        self.ln_scale + 0.5 * self.entries.iter().map(|e| e.norm_sqr()).sum::<f64>().ln()
    }
}

fn evanescence_arg(zeta: f64, kappa: Wavenumber) -> Result<f64> {
    if !(zeta >= 0.0) || !zeta.is_finite() {
        return Err(EpwError::Domain(format!("zeta = {zeta} must be finite and >= 0")));
    }
    Ok(1.0 + zeta / (2.0 * kappa.get()))
}

/// 𝐏_ℓ(ζ) for every ℓ ≤ lmax.
pub fn p_vectors(lmax: usize, zeta: f64, kappa: Wavenumber) -> Result<Vec<PVector>> {
    let z = evanescence_arg(zeta, kappa)?;
    let t = normalized_legendre_ext_table(lmax, z)?;
    Ok((0..=lmax)
        .map(|l| {
            let s = (0..=l)
                .map(|m| t.get(l, m))
                .filter(|v| !v.is_zero())
                .map(|v| v.ln_abs)
                .fold(f64::NEG_INFINITY, f64::max);
            let entries = (-(l as isize)..=l as isize)
                .map(|m| {
                    let v = t.get(l, m.unsigned_abs());
                    if v.is_zero() {
                        Complex64::new(0.0, 0.0)
                    } else {
                        i_pow(m) * (v.ln_abs - s).exp()
                    }
                })
                .collect();
            PVector { ell: l, ln_scale: s, entries }
        })
        .collect())
}

pub fn p_vector(ell: usize, zeta: f64, kappa: Wavenumber) -> Result<PVector> {
    Ok(p_vectors(ell, zeta, kappa)?.pop().expect("nonempty"))
}

/// ã_ℓ^m(y) = 𝐃_ℓ^m(θ,ψ)·𝐏_ℓ(ζ) for all ℓ ≤ lmax, with a log scale per degree.
#[derive(Clone, Debug)]
pub struct DensityValues {
    pub lmax: usize,
    /// The value at (ℓ,m) is e^{ln_scale[ℓ]} · values[flat(ℓ,m)].
    pub ln_scale: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl DensityValues {
    pub fn get(&self, idx: ModalIndex) -> Complex64 {
        self.values[idx.flat()] * self.ln_scale[idx.ell()].exp()
    }
}

pub fn density_values(lmax: usize, y: &EpwParams, kappa: Wavenumber) -> Result<DensityValues> {
    let ps = p_vectors(lmax, y.zeta, kappa)?;
    let ds = wigner_d_all(lmax, y.theta1);
    let mut values = vec![Complex64::new(0.0, 0.0); (lmax + 1) * (lmax + 1)];
    let mut ln_scale = Vec::with_capacity(lmax + 1);
    for l in 0..=lmax {
        let li = l as isize;
        let p = &ps[l];
        let d = &ds[l];
        // e^{im'ψ} P[m'] is shared by every column m
        let wp: Vec<Complex64> = (-li..=li)
            .map(|mp| Complex64::cis(mp as f64 * y.psi) * p.entries[(mp + li) as usize])
            .collect();
        for m in -li..=li {
            let mut acc = Complex64::new(0.0, 0.0);
            for mp in -li..=li {
                acc += wp[(mp + li) as usize] * d.get(mp, m);
            }
            values[l * l + (m + li) as usize] = Complex64::cis(m as f64 * y.theta2) * acc;
        }
        ln_scale.push(p.ln_scale);
    }
    Ok(DensityValues { lmax, ln_scale, values })
}

/// Coefficients (EW_y, b_ℓ^m)_𝓑 for ℓ ≤ L.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModalCoefficients {
    pub kappa: f64,
    pub lmax: usize,
    pub coeffs: Vec<Complex64>,
}

impl ModalCoefficients {
    pub fn get(&self, idx: ModalIndex) -> Complex64 {
        self.coeffs[idx.flat()]
    }

    /// Per-degree ℓ² norms of the coefficient table.
    pub fn degree_norms(&self) -> Vec<f64> {
        (0..=self.lmax)
            .map(|l| self.coeffs[l * l..(l + 1) * (l + 1)].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
            .collect()
    }

    /// Σ c_ℓ^m b_ℓ^m(x) given the basis values in flat order.
    pub fn synthesize(&self, basis_values: &[Complex64]) -> Complex64 {
        self.coeffs.iter().zip(basis_values).map(|(c, b)| c * b).sum()
    }
}

/// Generalized Jacobi–Anger coefficients 4π i^ℓ β_ℓ^{−1} conj(𝐃_ℓ^m·𝐏_ℓ(ζ)).
pub fn jacobi_anger_coeffs(y: &EpwParams, kappa: Wavenumber, lmax: usize) -> Result<ModalCoefficients> {
    let dv = density_values(lmax, y, kappa)?;
    let lb = beta_table(lmax, kappa)?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); dv.values.len()];
    for l in 0..=lmax {
        let pre = i_pow(l as isize) * ((4.0 * PI).ln() - lb[l] + dv.ln_scale[l]).exp();
        for k in l * l..(l + 1) * (l + 1) {
            coeffs[k] = pre * dv.values[k].conj();
        }
    }
    Ok(ModalCoefficients { kappa: kappa.get(), lmax, coeffs })
}

/// ln ÊW_ℓ(ζ) = ln((4π/β_ℓ)|𝐏_ℓ(ζ)|) for ℓ ≤ lmax; independent of the angles.
pub fn ln_coefficient_norms(lmax: usize, zeta: f64, kappa: Wavenumber) -> Result<Vec<f64>> {
    let ps = p_vectors(lmax, zeta, kappa)?;
    let lb = beta_table(lmax, kappa)?;
    Ok(ps.iter().zip(&lb).map(|(p, b)| (4.0 * PI).ln() - b + p.ln_norm()).collect())
}

/// |Σ_m conj(𝐃_ℓ^m·𝐏_ℓ) Y_ℓ^m(x) − (2ℓ+1)/(4π) P_ℓ(d(y)·x)| for a unit vector x.
pub fn addition_theorem_check(ell: usize, x: &Point3, y: &EpwParams, kappa: Wavenumber) -> Result<f64> {
    let dv = density_values(ell, y, kappa)?;
    let (th, ph) = angles(x);
    let ys = spherical_harmonics_all(ell, th, ph);
    let li = ell as isize;
    let mut lhs = Complex64::new(0.0, 0.0);
    for m in -li..=li {
        let idx = ModalIndex::new(ell, m)?;
        lhs += dv.get(idx).conj() * ys[idx.flat()];
    }
    let d = direction(y, kappa);
    let xc = x.map(|v| Complex64::new(v, 0.0));
    let rhs = legendre_p_complex(ell, d.dot_complex(&xc)) * ((2 * ell + 1) as f64 / (4.0 * PI));
    Ok((lhs - rhs).norm())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaMode {
    Quadrature,
    Approx,
}

/// ln of the closed-form approximation of α_ℓ built on the upper incomplete Gamma function.
fn ln_alpha_approx(ell: usize, kappa: f64) -> Result<f64> {
    let l = ell as f64;
    let a = 2.0 * l + 1.5;
    let ln_upper = ln_gamma(a) + ln_upper_gamma_q(a, 2.0 * kappa)?;
    let inner = (2.0 * PI.sqrt()).ln() - ln_factorial(ell) + ln_gamma(l + 0.5) + ln_upper;
    Ok(l * kappa.ln() - kappa - 0.5 * inner)
}

const PANEL_ORDER: usize = 20;

/// ln ∫₀^∞ |𝐏_ℓ(ζ)|² ζ^{1/2} e^{−ζ} dζ for every ℓ ≤ lmax, on a composite
/// Gauss–Legendre rule in u = √ζ with the given panel width.
fn ln_weighted_moments(lmax: usize, kappa: Wavenumber, width: f64) -> Result<Vec<f64>> {
    let lf = lmax as f64;
    let umax = (2.0 * lf + 60.0 + 14.0 * (2.0 * lf + 1.0).sqrt()).sqrt();
    let panels = (umax / width).ceil() as usize;
    let h = umax / panels as f64;
    let (gx, gw) = gauss_legendre(PANEL_ORDER);
    let mut terms: Vec<Vec<f64>> = vec![Vec::with_capacity(panels * PANEL_ORDER); lmax + 1];
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (xi, wi) in gx.iter().zip(&gw) {
            let u = mid + 0.5 * h * xi;
            let zeta = u * u;
            // dζ = 2u du and ζ^{1/2} = u
            let ln_w = (0.5 * h * wi).ln() + (2.0 * u * u).ln() - zeta;
            let ps = p_vectors(lmax, zeta, kappa)?;
            for (l, pv) in ps.iter().enumerate() {
                terms[l].push(ln_w + 2.0 * pv.ln_norm());
            }
        }
    }
    Ok(terms.into_iter().map(|t| log_sum_exp(t.into_iter())).collect())
}

fn ln_alpha_quadrature(lmax: usize, kappa: Wavenumber) -> Result<Vec<f64>> {
    let mut width = 0.5;
    let mut coarse = ln_weighted_moments(lmax, kappa, width)?;
    for _ in 0..5 {
        width *= 0.5;
        let fine = ln_weighted_moments(lmax, kappa, width)?;
        let worst = coarse
            .iter()
            .zip(&fine)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if worst < 1e-10 {
            return Ok(fine
                .iter()
                .enumerate()
                .map(|(l, m)| -0.5 * ((8.0 * PI * PI / (2 * l + 1) as f64).ln() + m))
                .collect());
        }
        coarse = fine;
    }
    Err(EpwError::Quadrature(format!(
        "alpha quadrature did not reach 1e-10 relative for lmax={lmax}, kappa={}",
        kappa.get()
    )))
}

/// ln α_ℓ for ℓ = 0..=lmax.
pub fn alpha_table(lmax: usize, kappa: Wavenumber, mode: AlphaMode) -> Result<Vec<f64>> {
    match mode {
        AlphaMode::Quadrature => ln_alpha_quadrature(lmax, kappa),
        AlphaMode::Approx => (0..=lmax).map(|l| ln_alpha_approx(l, kappa.get())).collect(),
    }
}

/// Normalization α_ℓ of the Herglotz densities, log-scaled.
pub fn alpha(ell: usize, kappa: Wavenumber, mode: AlphaMode) -> Result<LogScaled> {
    let v = match mode {
        AlphaMode::Quadrature => ln_alpha_quadrature(ell, kappa)?[ell],
        AlphaMode::Approx => ln_alpha_approx(ell, kappa.get())?,
    };
    Ok(LogScaled::positive(v))
}

/// Normalized Herglotz densities a_ℓ^m = α_ℓ ã_ℓ^m for ℓ ≤ lmax.
#[derive(Clone, Debug)]
pub struct HerglotzBasis {
    pub kappa: Wavenumber,
    pub lmax: usize,
    pub ln_alpha: Vec<f64>,
}

impl HerglotzBasis {
    pub fn new(lmax: usize, kappa: Wavenumber, mode: AlphaMode) -> Result<Self> {
        Ok(HerglotzBasis { kappa, lmax, ln_alpha: alpha_table(lmax, kappa, mode)? })
    }

    /// a_ℓ^m(y) for all ℓ ≤ lmax in flat order.
    pub fn eval_all(&self, y: &EpwParams) -> Result<Vec<Complex64>> {
        let dv = density_values(self.lmax, y, self.kappa)?;
        let mut out = dv.values;
        for l in 0..=self.lmax {
            let s = (self.ln_alpha[l] + dv.ln_scale[l]).exp();
            for v in &mut out[l * l..(l + 1) * (l + 1)] {
                *v *= s;
            }
        }
        Ok(out)
    }
}

/// a_ℓ^m(y) = α_ℓ 𝐃_ℓ^m(θ,ψ)·𝐏_ℓ(ζ), with α_ℓ by quadrature.
pub fn herglotz_density_eval(idx: ModalIndex, y: &EpwParams, kappa: Wavenumber) -> Result<Complex64> {
    let la = ln_alpha_quadrature(idx.ell(), kappa)?[idx.ell()];
    let dv = density_values(idx.ell(), y, kappa)?;
    Ok(dv.values[idx.flat()] * (la + dv.ln_scale[idx.ell()]).exp())
}

/// τ_ℓ = 4π i^ℓ (α_ℓ β_ℓ)^{−1}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TauTable {
    pub kappa: f64,
    pub values: Vec<Complex64>,
}

pub fn tau_table(lmax: usize, kappa: Wavenumber) -> Result<TauTable> {
    let la = alpha_table(lmax, kappa, AlphaMode::Quadrature)?;
    let lb = beta_table(lmax, kappa)?;
    let values = (0..=lmax)
        .map(|l| i_pow(l as isize) * ((4.0 * PI).ln() - la[l] - lb[l]).exp())
        .collect();
    Ok(TauTable { kappa: kappa.get(), values })
}
