use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ln_factorial, LogScaled};
use crate::error::{domain_err, Result};

/// Degree/order pair (ℓ, m) with |m| ≤ ℓ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModalIndex {
    ell: usize,
    m: isize,
}

impl ModalIndex {
    pub fn new(ell: usize, m: isize) -> Result<Self> {
        if m.unsigned_abs() > ell {
            return domain_err(format!("order {m} exceeds degree {ell}"));
        }
        Ok(ModalIndex { ell, m })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn m(&self) -> isize {
        self.m
    }

    /// Position in the flat ordering (0,0), (1,−1), (1,0), (1,1), (2,−2), …
    pub fn flat(&self) -> usize {
        self.ell * self.ell + (self.ell as isize + self.m) as usize
    }

    pub fn from_flat(k: usize) -> Self {
        let mut ell = (k as f64).sqrt() as usize;
        while ell * ell > k {
            ell -= 1;
        }
        while (ell + 1) * (ell + 1) <= k {
            ell += 1;
        }
        let m = k as isize - (ell * ell + ell) as isize;
        ModalIndex { ell, m }
    }

    /// All indices with ℓ ≤ lmax in flat order.
    pub fn all(lmax: usize) -> impl Iterator<Item = ModalIndex> {
        (0..=lmax).flat_map(|ell| {
            (-(ell as isize)..=ell as isize).map(move |m| ModalIndex { ell, m })
        })
    }
}

/// Triangular table over 0 ≤ m ≤ ℓ ≤ lmax.
#[derive(Clone, Debug)]
pub struct TriTable<T> {
    lmax: usize,
    data: Vec<T>,
}

impl<T: Copy> TriTable<T> {
    fn filled(lmax: usize, v: T) -> Self {
        TriTable { lmax, data: vec![v; (lmax + 1) * (lmax + 2) / 2] }
    }

    fn pos(ell: usize, m: usize) -> usize {
        ell * (ell + 1) / 2 + m
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn get(&self, ell: usize, m: usize) -> T {
        assert!(m <= ell && ell <= self.lmax);
        self.data[Self::pos(ell, m)]
    }

    fn set(&mut self, ell: usize, m: usize, v: T) {
        self.data[Self::pos(ell, m)] = v;
    }
}

/// ln γ_ℓ^m with γ_ℓ^m = sqrt((2ℓ+1)/4π · (ℓ−m)!/(ℓ+m)!).
pub(crate) fn ln_gamma_norm(ell: usize, m: isize) -> f64 {
    let lm = (ell as isize - m) as usize;
    let lp = (ell as isize + m) as usize;
    0.5 * (((2 * ell + 1) as f64 / (4.0 * PI)).ln() + ln_factorial(lm) - ln_factorial(lp))
}

fn rec_coeffs(ell: usize, m: usize) -> (f64, f64) {
    let l = ell as f64;
    let mf = m as f64;
    let a = ((2.0 * l + 1.0) * (2.0 * l - 1.0) / ((l - mf) * (l + mf))).sqrt();
    let b = ((2.0 * l + 1.0) * (l - mf - 1.0) * (l + mf - 1.0)
        / ((2.0 * l - 3.0) * (l - mf) * (l + mf)))
        .sqrt();
    (a, b)
}

/// Normalized Ferrers values γ_ℓ^m 𝖯_ℓ^m(x) for fixed m ≥ 0 and ℓ = m..=lmax.
pub fn normalized_ferrers_column(lmax: usize, m: usize, x: f64) -> Vec<f64> {
    assert!(m <= lmax);
    let s = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut seed = 1.0 / (4.0 * PI).sqrt();
    for k in 1..=m {
        seed *= -((2 * k + 1) as f64 / (2 * k) as f64).sqrt() * s;
    }
    let mut out = Vec::with_capacity(lmax - m + 1);
    out.push(seed);
    let mut prev = 0.0;
    let mut cur = seed;
    for ell in m + 1..=lmax {
        let (a, b) = rec_coeffs(ell, m);
        let next = a * x * cur - b * prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

fn normalized_ferrers_table(lmax: usize, x: f64) -> TriTable<f64> {
    let mut t = TriTable::filled(lmax, 0.0);
    for m in 0..=lmax {
        for (k, v) in normalized_ferrers_column(lmax, m, x).into_iter().enumerate() {
            t.set(m + k, m, v);
        }
    }
    t
}

/// Ferrers function 𝖯_ℓ^m(x) on [−1,1], Condon–Shortley phase included.
pub fn ferrers(idx: ModalIndex, x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0) {
        return domain_err(format!("Ferrers argument {x} outside [-1,1]"));
    }
    let ell = idx.ell();
    let m = idx.m();
    let ma = m.unsigned_abs();
    let col = normalized_ferrers_column(ell, ma, x);
    let pbar = col[ell - ma];
    // γ^{−m}𝖯^{−m} = (−1)^m γ^m 𝖯^m, so both signs divide the same normalized value.
    let sign = if m < 0 && ma % 2 == 1 { -1.0 } else { 1.0 };
    Ok(sign * pbar / ln_gamma_norm(ell, m).exp())
}

/// Normalized extended Legendre values γ_ℓ^m P_ℓ^m(z) for z ≥ 1, all 0 ≤ m ≤ ℓ ≤ lmax,
/// in log-scaled form. All values are nonnegative.
pub fn normalized_legendre_ext_table(lmax: usize, z: f64) -> Result<TriTable<LogScaled>> {
    if !(z >= 1.0) || !z.is_finite() {
        return domain_err(format!("extended Legendre argument {z} must be >= 1"));
    }
    let mut t = TriTable::filled(lmax, LogScaled::ZERO);
    let ln_t2 = ((z - 1.0) * (z + 1.0)).ln();
    let mut ln_seed = -0.5 * (4.0 * PI).ln();
    for m in 0..=lmax {
        if m > 0 {
            ln_seed += 0.5 * ((2 * m + 1) as f64 / (2 * m) as f64).ln() + 0.5 * ln_t2;
        }
        if z == 1.0 && m > 0 {
            break;
        }
        let mut scale = ln_seed;
        let mut prev = 0.0f64;
        let mut cur = 1.0f64;
        t.set(m, m, LogScaled::positive(ln_seed));
        for ell in m + 1..=lmax {
            let (a, b) = rec_coeffs(ell, m);
            let next = a * z * cur - b * prev;
            prev = cur;
            cur = next;
            if cur > 1e200 {
                prev /= cur;
                scale += cur.ln();
                cur = 1.0;
            }
            t.set(ell, m, LogScaled::positive(scale + cur.ln()));
        }
    }
    Ok(t)
}

/// Associated Legendre function P_ℓ^m(z) on z ≥ 1 (no Condon–Shortley phase).
pub fn assoc_legendre_ext(idx: ModalIndex, z: f64) -> Result<LogScaled> {
    let ell = idx.ell();
    let ma = idx.m().unsigned_abs();
    let t = normalized_legendre_ext_table(ell, z)?;
    let v = t.get(ell, ma);
    if v.is_zero() {
        return Ok(v);
    }
    // γ^{−m}P^{−m} = γ^m P^m (no alternating sign on [1,∞)).
    Ok(LogScaled::positive(v.ln_abs - ln_gamma_norm(ell, idx.m())))
}

/// Spherical harmonic Y_ℓ^m(θ,φ), orthonormal on the unit sphere.
pub fn spherical_harmonic(idx: ModalIndex, theta: f64, phi: f64) -> Complex64 {
    debug_assert!((0.0..=PI).contains(&theta));
    let ell = idx.ell();
    let m = idx.m();
    let ma = m.unsigned_abs();
    let col = normalized_ferrers_column(ell, ma, theta.cos());
    let pos = Complex64::from_polar(col[ell - ma], ma as f64 * phi);
    if m >= 0 {
        pos
    } else if ma % 2 == 1 {
        -pos.conj()
    } else {
        pos.conj()
    }
}

/// Y_ℓ^m(θ,φ) for all ℓ ≤ lmax in [`ModalIndex::flat`] order.
pub fn spherical_harmonics_all(lmax: usize, theta: f64, phi: f64) -> Vec<Complex64> {
    let t = normalized_ferrers_table(lmax, theta.cos());
    let mut out = vec![Complex64::new(0.0, 0.0); (lmax + 1) * (lmax + 1)];
    let phases: Vec<Complex64> = (0..=lmax).map(|m| Complex64::cis(m as f64 * phi)).collect();
    for ell in 0..=lmax {
        let base = ell * ell + ell;
        for m in 0..=ell {
            let y = phases[m] * t.get(ell, m);
            out[base + m] = y;
            if m > 0 {
                out[base - m] = if m % 2 == 1 { -y.conj() } else { y.conj() };
            }
        }
    }
    out
}

/// Legendre polynomial P_ℓ(w) at a complex argument (Bonnet recurrence).
pub fn legendre_p_complex(ell: usize, w: Complex64) -> Complex64 {
    let mut p0 = Complex64::new(1.0, 0.0);
    if ell == 0 {
        return p0;
    }
    let mut p1 = w;
    for k in 2..=ell {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * w * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    p1
}
