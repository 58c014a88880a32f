use num_complex::Complex64;

use super::{binomial, ln_factorial};

/// Square (2ℓ+1)×(2ℓ+1) block indexed by m, m' ∈ [−ℓ, ℓ].
#[derive(Clone, Debug, PartialEq)]
pub struct WignerBlock<T> {
    ell: usize,
    entries: Vec<T>,
}

impl<T: Copy> WignerBlock<T> {
    fn filled(ell: usize, v: T) -> Self {
        let n = 2 * ell + 1;
        WignerBlock { ell, entries: vec![v; n * n] }
    }

    fn pos(&self, m: isize, mp: isize) -> usize {
        let l = self.ell as isize;
        debug_assert!(m.abs() <= l && mp.abs() <= l);
        ((m + l) * (2 * l + 1) + (mp + l)) as usize
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn dim(&self) -> usize {
        2 * self.ell + 1
    }

    pub fn get(&self, m: isize, mp: isize) -> T {
        self.entries[self.pos(m, mp)]
    }

    fn set(&mut self, m: isize, mp: isize, v: T) {
        let p = self.pos(m, mp);
        self.entries[p] = v;
    }

    /// Row-major entries, row index m + ℓ, column index m' + ℓ.
    pub fn as_slice(&self) -> &[T] {
        &self.entries
    }
}

/// d_j^{m,m'}(θ) at j = max(|m|,|m'|), where the sum collapses to one term.
fn seed(m: isize, mp: isize, c: f64, s: f64) -> f64 {
    let j = m.abs().max(mp.abs());
    let ju = j as usize;
    let pw = |base: f64, e: isize| base.powi(e as i32);
    if m == j {
        binomial(2 * ju, (j + mp) as usize).sqrt() * pw(c, j + mp) * pw(s, j - mp)
    } else if m == -j {
        let sg = if (j + mp) % 2 == 0 { 1.0 } else { -1.0 };
        sg * binomial(2 * ju, (j + mp) as usize).sqrt() * pw(c, j - mp) * pw(s, j + mp)
    } else if mp == j {
        let sg = if (j - m) % 2 == 0 { 1.0 } else { -1.0 };
        sg * binomial(2 * ju, (j + m) as usize).sqrt() * pw(c, j + m) * pw(s, j - m)
    } else {
        binomial(2 * ju, (j + m) as usize).sqrt() * pw(c, j - m) * pw(s, j + m)
    }
}

/// Wigner d-matrices for every ℓ ≤ lmax at angle θ.
///
/// Each (m, m') sequence is generated by the three-term recurrence in ℓ,
/// seeded from the closed form at ℓ = max(|m|,|m'|).
pub fn wigner_d_all(lmax: usize, theta: f64) -> Vec<WignerBlock<f64>> {
    let mut blocks: Vec<WignerBlock<f64>> =
        (0..=lmax).map(|l| WignerBlock::filled(l, 0.0)).collect();
    let c = (0.5 * theta).cos();
    let s = (0.5 * theta).sin();
    let ct = theta.cos();
    let lm = lmax as isize;
    for m in -lm..=lm {
        for mp in -lm..=lm {
            let j0 = m.abs().max(mp.abs());
            let mut dm2 = 0.0;
            let mut dm1 = seed(m, mp, c, s);
            blocks[j0 as usize].set(m, mp, dm1);
            let (mf, mpf) = (m as f64, mp as f64);
            for j in j0 + 1..=lm {
                let d = if j0 == 0 && j == 1 {
                    ct
                } else {
                    let jf = j as f64;
                    let a = (2.0 * jf - 1.0) * (jf * (jf - 1.0) * ct - mf * mpf);
                    let b = jf
                        * (((jf - 1.0).powi(2) - mf * mf) * ((jf - 1.0).powi(2) - mpf * mpf))
                            .max(0.0)
                            .sqrt();
                    let den = (jf - 1.0) * ((jf * jf - mf * mf) * (jf * jf - mpf * mpf)).sqrt();
                    (a * dm1 - b * dm2) / den
                };
                blocks[j as usize].set(m, mp, d);
                dm2 = dm1;
                dm1 = d;
            }
        }
    }
    blocks
}

/// Wigner d-matrix of degree ℓ at angle θ.
pub fn wigner_d(ell: usize, theta: f64) -> WignerBlock<f64> {
    wigner_d_all(ell, theta).pop().expect("at least one block")
}

/// Direct evaluation of the finite sum defining d_ℓ^{m,m'}(θ), with compensated
/// summation. Loses accuracy for large ℓ through cancellation; kept as a
/// reference for small degrees.
pub fn wigner_d_direct(ell: usize, theta: f64) -> WignerBlock<f64> {
    let mut out = WignerBlock::filled(ell, 0.0);
    let c = (0.5 * theta).cos();
    let s = (0.5 * theta).sin();
    let l = ell as isize;
    let lf = |n: isize| ln_factorial(n as usize);
    for m in -l..=l {
        for mp in -l..=l {
            let pre = 0.5 * (lf(l + m) + lf(l - m) + lf(l + mp) + lf(l - mp));
            let kmin = 0.max(mp - m);
            let kmax = (l - m).min(l + mp);
            let mut sum = 0.0f64;
            let mut comp = 0.0f64;
            for k in kmin..=kmax {
                let ln_w = pre - lf(l - m - k) - lf(l + mp - k) - lf(k + m - mp) - lf(k);
                let sg = if k % 2 == 0 { 1.0 } else { -1.0 };
                let ec = 2 * (l - k) + mp - m;
                let es = 2 * k + m - mp;
                let term = sg * ln_w.exp() * c.powi(ec as i32) * s.powi(es as i32);
                let y = term - comp;
                let t = sum + y;
                comp = (t - sum) - y;
                sum = t;
            }
            out.set(m, mp, sum);
        }
    }
    out
}

fn rotate(d: &WignerBlock<f64>, theta2: f64, psi: f64) -> WignerBlock<Complex64> {
    let l = d.ell as isize;
    let mut out = WignerBlock::filled(d.ell, Complex64::new(0.0, 0.0));
    for m in -l..=l {
        for mp in -l..=l {
            let phase = mp as f64 * theta2 + m as f64 * psi;
            out.set(m, mp, Complex64::cis(phase) * d.get(m, mp));
        }
    }
    out
}

/// Wigner D-matrix D_ℓ^{m,m'} = e^{im'θ₂} d_ℓ^{m,m'}(θ₁) e^{imψ}.
#[allow(non_snake_case)]
pub fn wigner_D(ell: usize, theta1: f64, theta2: f64, psi: f64) -> WignerBlock<Complex64> {
    rotate(&wigner_d(ell, theta1), theta2, psi)
}

/// Wigner D-matrices for every ℓ ≤ lmax.
#[allow(non_snake_case)]
pub fn wigner_D_all(lmax: usize, theta1: f64, theta2: f64, psi: f64) -> Vec<WignerBlock<Complex64>> {
    wigner_d_all(lmax, theta1).iter().map(|d| rotate(d, theta2, psi)).collect()
}
