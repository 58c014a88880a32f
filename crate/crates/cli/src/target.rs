//! Random spherical-wave expansions used as reconstruction targets.

use epw::specfun::ModalIndex;
use epw::waves::{Point3, SphericalWaveBasis, Wavenumber};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;

/// Complex standard normal (E|z|² = 1) for the counter `index`: the value depends
/// only on (seed, index), not on how many draws came before.
pub fn counter_normal(seed: u64, index: u64) -> Complex64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// u = Σ_{ℓ≤L} Σ_m û_ℓ^m b_ℓ^m with û_ℓ^m = z_ℓ^m / max{1, ℓ−κ}.
#[derive(Clone, Debug)]
pub struct RandomExpansionTarget {
    pub basis: SphericalWaveBasis,
    /// Coefficients in [`ModalIndex::flat`] order.
    pub coeffs: Vec<Complex64>,
}

impl RandomExpansionTarget {
    pub fn new(l: usize, kappa: Wavenumber, seed: u64) -> Result<Self> {
        let basis = SphericalWaveBasis::new(l, kappa)?;
        let k = kappa.get();
        let mut coeffs = Vec::with_capacity((l + 1) * (l + 1));
        for ell in 0..=l {
            let damp = 1.0 / (ell as f64 - k).max(1.0);
            for m in -(ell as isize)..=ell as isize {
                let j = ModalIndex::new(ell, m)?.flat();
                coeffs.push(counter_normal(seed, j as u64) * damp);
            }
        }
        Ok(RandomExpansionTarget { basis, coeffs })
    }

    /// ‖u‖_𝓑, exact since {b_ℓ^m} is orthonormal.
    pub fn b_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn eval(&self, x: &Point3) -> Complex64 {
        self.basis.eval_all(x).iter().zip(&self.coeffs).map(|(b, c)| b * c).sum()
    }
}
