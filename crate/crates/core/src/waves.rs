//! Plane waves (propagative and evanescent) and normalized spherical waves.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain_err, Result};
use crate::specfun::{
    spherical_bessel_seq, spherical_harmonic, spherical_harmonics_all, LogScaled, ModalIndex,
};

pub type Point3 = [f64; 3];

pub(crate) fn dot(a: &Point3, b: &Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: &Point3) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wavenumber(f64);

impl Wavenumber {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return domain_err(format!("wavenumber must be positive, got {kappa}"));
        }
        Ok(Wavenumber(kappa))
    }

    pub fn get(&self) -> f64 {
        self.0
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.0
    }
}

/// Point y = (θ₁, θ₂, ψ, ζ) of the parametric domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpwParams {
    pub theta1: f64,
    pub theta2: f64,
    pub psi: f64,
    pub zeta: f64,
}

impl EpwParams {
    pub fn new(theta1: f64, theta2: f64, psi: f64, zeta: f64) -> Result<Self> {
        let tau = 2.0 * PI;
        if !(0.0..=PI).contains(&theta1) {
            return domain_err(format!("theta1 = {theta1} outside [0, pi]"));
        }
        if !(0.0..tau).contains(&theta2) || !(0.0..tau).contains(&psi) {
            return domain_err(format!("theta2 = {theta2}, psi = {psi} must lie in [0, 2pi)"));
        }
        if !(zeta >= 0.0) || !zeta.is_finite() {
            return domain_err(format!("zeta = {zeta} must be finite and >= 0"));
        }
        Ok(EpwParams { theta1, theta2, psi, zeta })
    }

    /// Parameters of the propagative wave with direction (θ₁, θ₂).
    pub fn ppw(theta1: f64, theta2: f64) -> Result<Self> {
        Self::new(theta1, theta2, 0.0, 0.0)
    }
}

/// Complex direction d with d·d = 1, split into real and imaginary parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexDirection {
    pub d: [Complex64; 3],
    /// Unit vector along Re d.
    pub propagation: Point3,
    /// Unit vector along Im d, or zero for a propagative wave.
    pub evanescence: Point3,
}

impl ComplexDirection {
    pub fn re(&self) -> Point3 {
        [self.d[0].re, self.d[1].re, self.d[2].re]
    }

    pub fn im(&self) -> Point3 {
        [self.d[0].im, self.d[1].im, self.d[2].im]
    }

    /// Bilinear (unconjugated) product d·x for complex x.
    pub fn dot_complex(&self, x: &[Complex64; 3]) -> Complex64 {
        self.d[0] * x[0] + self.d[1] * x[1] + self.d[2] * x[2]
    }
}

/// Columns R e_z and R e_x of R = R_z(θ₂) R_y(θ₁) R_z(ψ).
fn frame(theta1: f64, theta2: f64, psi: f64) -> (Point3, Point3) {
    let (s1, c1) = theta1.sin_cos();
    let (s2, c2) = theta2.sin_cos();
    let (sp, cp) = psi.sin_cos();
    let ez = [s1 * c2, s1 * s2, c1];
    let ex = [c2 * c1 * cp - s2 * sp, s2 * c1 * cp + c2 * sp, -s1 * cp];
    (ez, ex)
}

/// Apparent wavenumber κ + ζ/2 and decay rate √(ζ(ζ/4 + κ)).
fn rates(zeta: f64, kappa: f64) -> (f64, f64) {
    (kappa + 0.5 * zeta, (zeta * (0.25 * zeta + kappa)).sqrt())
}

pub fn direction(y: &EpwParams, kappa: Wavenumber) -> ComplexDirection {
    let k = kappa.get();
    let (ez, ex) = frame(y.theta1, y.theta2, y.psi);
    let (osc, decay) = rates(y.zeta, k);
    let z = osc / k;
    let t = decay / k;
    let d = [0, 1, 2].map(|i| Complex64::new(z * ez[i], t * ex[i]));
    let evanescence = if y.zeta > 0.0 { ex } else { [0.0; 3] };
    ComplexDirection { d, propagation: ez, evanescence }
}

/// Precomputed κ Re d and κ Im d of one plane wave.
#[derive(Clone, Copy, Debug)]
pub struct PlaneWaveKernel {
    pub k_re: Point3,
    pub k_im: Point3,
}

impl PlaneWaveKernel {
    pub fn new(y: &EpwParams, kappa: Wavenumber) -> Self {
        let (ez, ex) = frame(y.theta1, y.theta2, y.psi);
        let (osc, decay) = rates(y.zeta, kappa.get());
        PlaneWaveKernel { k_re: ez.map(|v| osc * v), k_im: ex.map(|v| decay * v) }
    }

    #[inline]
    pub fn eval(&self, x: &Point3) -> Complex64 {
        Complex64::from_polar((-dot(&self.k_im, x)).exp(), dot(&self.k_re, x))
    }

    /// e^{ln_scale} times the wave, with the exponent combined before exponentiation.
    #[inline]
    pub fn eval_scaled(&self, x: &Point3, ln_scale: f64) -> Complex64 {
        Complex64::from_polar((ln_scale - dot(&self.k_im, x)).exp(), dot(&self.k_re, x))
    }

    /// ln |e^{iκ d·x}| = −κ Im d · x.
    pub fn ln_modulus(&self, x: &Point3) -> f64 {
        -dot(&self.k_im, x)
    }
}

/// EW_y(x) = e^{iκ d(y)·x}.
pub fn epw_eval(y: &EpwParams, kappa: Wavenumber, x: &Point3) -> Complex64 {
    PlaneWaveKernel::new(y, kappa).eval(x)
}

/// PW_θ(x) = EW_{(θ,0,0)}(x).
pub fn ppw_eval(theta1: f64, theta2: f64, kappa: Wavenumber, x: &Point3) -> Complex64 {
    let y = EpwParams { theta1, theta2, psi: 0.0, zeta: 0.0 };
    epw_eval(&y, kappa, x)
}

/// ln β_ℓ for ℓ = 0..=lmax from the Bessel closed form
/// β_ℓ^{−2} = (1+ℓ/κ²) j_ℓ(κ)² − (j_{ℓ−1}(κ) + j_ℓ(κ)/κ) j_{ℓ+1}(κ).
pub fn beta_table(lmax: usize, kappa: Wavenumber) -> Result<Vec<f64>> {
    let k = kappa.get();
    let js = spherical_bessel_seq(lmax + 1, k)?;
    let jm1 = LogScaled::from_f64(k.cos() / k);
    (0..=lmax)
        .map(|l| {
            let a = if l == 0 { jm1 } else { js[l - 1] };
            let b = js[l];
            let c = js[l + 1];
            let s = [a, b, c]
                .iter()
                .filter(|v| !v.is_zero())
                .map(|v| v.ln_abs)
                .fold(f64::NEG_INFINITY, f64::max);
            let u = |v: LogScaled| if v.is_zero() { 0.0 } else { f64::from(v.sign) * (v.ln_abs - s).exp() };
            let (ua, ub, uc) = (u(a), u(b), u(c));
            let bracket = (1.0 + l as f64 / (k * k)) * ub * ub - (ua + ub / k) * uc;
            if !(bracket > 0.0) {
                return domain_err(format!("B-norm bracket not positive at l={l}, kappa={k}"));
            }
            Ok(-0.5 * (bracket.ln() + 2.0 * s))
        })
        .collect()
}

/// Normalization β_ℓ = ‖b̃_ℓ^m‖_𝓑^{−1}, log-scaled.
pub fn beta(ell: usize, kappa: Wavenumber) -> Result<LogScaled> {
    Ok(LogScaled::positive(beta_table(ell, kappa)?[ell]))
}

/// Spherical direction angles of a nonzero point.
pub(crate) fn angles(x: &Point3) -> (f64, f64) {
    let r = norm(x);
    let theta = (x[2] / r).clamp(-1.0, 1.0).acos();
    let mut phi = x[1].atan2(x[0]);
    if phi < 0.0 {
        phi += 2.0 * PI;
    }
    (theta, phi)
}

/// Normalized spherical wave b_ℓ^m = β_ℓ j_ℓ(κ|x|) Y_ℓ^m(x/|x|).
#[derive(Clone, Copy, Debug)]
pub struct SphericalWave {
    pub idx: ModalIndex,
    pub kappa: Wavenumber,
    pub beta: LogScaled,
}

impl SphericalWave {
    pub fn new(idx: ModalIndex, kappa: Wavenumber) -> Result<Self> {
        Ok(SphericalWave { idx, kappa, beta: beta(idx.ell(), kappa)? })
    }
}

pub fn spherical_wave_eval(sw: &SphericalWave, x: &Point3) -> Complex64 {
    let ell = sw.idx.ell();
    let r = norm(x);
    if r == 0.0 {
        if ell == 0 {
            return Complex64::new(sw.beta.value() / (4.0 * PI).sqrt(), 0.0);
        }
        return Complex64::new(0.0, 0.0);
    }
    let j = spherical_bessel_seq(ell, sw.kappa.get() * r).expect("finite radius")[ell];
    if j.is_zero() {
        return Complex64::new(0.0, 0.0);
    }
    let (theta, phi) = angles(x);
    let radial = f64::from(j.sign) * (j.ln_abs + sw.beta.ln_abs).exp();
    spherical_harmonic(sw.idx, theta, phi) * radial
}

/// All normalized spherical waves with ℓ ≤ lmax, evaluated together.
#[derive(Clone, Debug)]
pub struct SphericalWaveBasis {
    pub kappa: Wavenumber,
    pub lmax: usize,
    pub ln_beta: Vec<f64>,
}

impl SphericalWaveBasis {
    pub fn new(lmax: usize, kappa: Wavenumber) -> Result<Self> {
        Ok(SphericalWaveBasis { kappa, lmax, ln_beta: beta_table(lmax, kappa)? })
    }

    /// b_ℓ^m(x) for all ℓ ≤ lmax in [`ModalIndex::flat`] order.
    pub fn eval_all(&self, x: &Point3) -> Vec<Complex64> {
        let n = (self.lmax + 1) * (self.lmax + 1);
        let r = norm(x);
        if r == 0.0 {
            let mut out = vec![Complex64::new(0.0, 0.0); n];
            out[0] = Complex64::new(self.ln_beta[0].exp() / (4.0 * PI).sqrt(), 0.0);
            return out;
        }
        let js = spherical_bessel_seq(self.lmax, self.kappa.get() * r).expect("finite radius");
        let (theta, phi) = angles(x);
        let mut ys = spherical_harmonics_all(self.lmax, theta, phi);
        for l in 0..=self.lmax {
            let j = js[l];
            let radial = if j.is_zero() {
                0.0
            } else {
                f64::from(j.sign) * (j.ln_abs + self.ln_beta[l]).exp()
            };
            for y in &mut ys[l * l..(l + 1) * (l + 1)] {
                *y *= radial;
            }
        }
        ys
    }
}
