mod common;

use std::f64::consts::PI;

use epw::modal::*;
use epw::specfun::{assoc_legendre_ext, ln_gamma, wigner_d, ModalIndex};
use epw::waves::*;
use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn k(v: f64) -> Wavenumber {
    Wavenumber::new(v).unwrap()
}

fn idx(l: usize, m: isize) -> ModalIndex {
    ModalIndex::new(l, m).unwrap()
}

fn random_params(rng: &mut ChaCha8Rng, zmax: f64) -> EpwParams {
    EpwParams::new(
        rng.random_range(0.0..PI),
        rng.random_range(0.0..2.0 * PI),
        rng.random_range(0.0..2.0 * PI),
        rng.random_range(0.0..zmax),
    )
    .unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, rmax: f64) -> [f64; 3] {
    loop {
        let x = [0, 1, 2].map(|_| rng.random_range(-rmax..rmax));
        if x.iter().map(|v| v * v).sum::<f64>() <= rmax * rmax {
            return x;
        }
    }
}

fn lnf(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

fn gamma_norm(l: usize, m: usize) -> f64 {
    (((2 * l + 1) as f64 / (4.0 * PI)).ln() + lnf(l - m) - lnf(l + m)).mul_add(0.5, 0.0).exp()
}

#[test]
fn p_vector_examples() {
    let p = p_vector(7, 0.0, k(6.0)).unwrap();
    for m in -7..=7isize {
        let want = if m == 0 { gamma_norm(7, 0) } else { 0.0 };
        assert!((p.get(m) - want).norm() < 1e-15);
    }
    let p = p_vector(0, 3.7, k(6.0)).unwrap();
    assert!((p.get(0).re - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);
    let p = p_vector(3, 5.0, k(6.0)).unwrap();
    let z: f64 = 1.0 + 5.0 / 12.0;
    for m in -3..=3isize {
        let ma = m.unsigned_abs();
        // explicit sum for P_3^{|m|}(z)
        let mut s = 0.0;
        for kk in 0..=3 - ma {
            let c = |n: usize, r: usize| lnf(n) - lnf(r) - lnf(n - r);
            s += (c(3, kk) + c(3, ma + kk)).exp()
                * (z - 1.0).powf(3.0 - ma as f64 / 2.0 - kk as f64)
                * (z + 1.0).powf(ma as f64 / 2.0 + kk as f64);
        }
        let pm = (lnf(3 + ma) - lnf(3)).exp() / 8.0 * s;
        let want = Complex64::new(0.0, 1.0).powi(m as i32) * gamma_norm(3, ma) * pm;
        assert!((p.get(m) - want).norm() < 1e-13 * want.norm(), "m={m}");
        let direct = assoc_legendre_ext(idx(3, ma as isize), z).unwrap().value();
        assert!((direct - pm).abs() < 1e-13 * pm);
    }
}

fn series_vs_direct(y: &EpwParams, x: &[f64; 3], kap: f64, lmax: usize) -> f64 {
    let c = jacobi_anger_coeffs(y, k(kap), lmax).unwrap();
    let basis = SphericalWaveBasis::new(lmax, k(kap)).unwrap();
    let series = c.synthesize(&basis.eval_all(x));
    let direct = epw_eval(y, k(kap), x);
    let d = direction(y, k(kap));
    let im = d.im();
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let sup = (kap * im.iter().map(|v| v * v).sum::<f64>().sqrt() * r).exp();
    (series - direct).norm() / sup
}

#[test]
fn jacobi_anger_pointwise() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let y = random_params(&mut rng, 20.0);
        let x = random_point(&mut rng, 0.9);
        let e = series_vs_direct(&y, &x, 6.0, 60);
        assert!(e < 1e-10, "{y:?} {x:?}: {e}");
    }
}

#[test]
fn jacobi_anger_classical_limit() {
    // ζ = 0, θ₁ = 0: only m = 0 survives, with value 4π i^ℓ β_ℓ^{−1} γ_ℓ^0
    let kap = k(6.0);
    let y = EpwParams::new(0.0, 1.3, 0.4, 0.0).unwrap();
    let c = jacobi_anger_coeffs(&y, kap, 20).unwrap();
    let b = beta_table(20, kap).unwrap();
    for l in 0..=20usize {
        for m in -(l as isize)..=l as isize {
            let got = c.get(idx(l, m));
            if m == 0 {
                let want = Complex64::new(0.0, 1.0).powi(l as i32) * 4.0 * PI * (-b[l]).exp() * gamma_norm(l, 0);
                assert!((got - want).norm() < 1e-13 * want.norm());
            } else {
                assert!(got.norm() < 1e-15);
            }
        }
    }
    // ζ = 0, general direction: coefficients are 4π i^ℓ β_ℓ^{−1} conj(Y_ℓ^m(θ))
    let y = EpwParams::new(0.9, 2.2, 1.7, 0.0).unwrap();
    let c = jacobi_anger_coeffs(&y, kap, 20).unwrap();
    for i in ModalIndex::all(20) {
        let yv = epw::specfun::spherical_harmonic(i, 0.9, 2.2);
        let want = Complex64::new(0.0, 1.0).powi(i.ell() as i32) * 4.0 * PI * (-b[i.ell()]).exp() * yv.conj();
        assert!((c.get(i) - want).norm() < 1e-12 * (1.0 + want.norm()));
    }
}

#[test]
fn coefficient_norms_and_angle_independence() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let kap = k(6.0);
    for _ in 0..10 {
        let y = random_params(&mut rng, 40.0);
        let c = jacobi_anger_coeffs(&y, kap, 60).unwrap();
        let norms = c.degree_norms();
        let want = ln_coefficient_norms(60, y.zeta, kap).unwrap();
        let y2 = EpwParams { theta1: rng.random_range(0.0..PI), theta2: 0.3, psi: 5.0, ..y };
        let n2 = jacobi_anger_coeffs(&y2, kap, 60).unwrap().degree_norms();
        for l in 0..=60 {
            let w = want[l].exp();
            assert!((norms[l] - w).abs() < 1e-10 * w, "l={l}");
            assert!((n2[l] - norms[l]).abs() < 1e-11 * norms[l], "l={l}");
        }
    }
}

#[test]
fn modal_profiles() {
    let kap = 6.0;
    let argmax = |z: f64| {
        let n = ln_coefficient_norms(60, z, k(kap)).unwrap();
        let (am, _) = n.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, v)| if *v > b.1 { (i, *v) } else { b });
        (am, n)
    };
    let (am0, n0) = argmax(0.0);
    assert!(am0 as f64 <= kap);
    // super-exponential decay: successive log-ratios keep decreasing past the peak
    for l in 12..59 {
        assert!(n0[l + 1] - n0[l] < n0[l] - n0[l - 1]);
    }
    assert!(n0[40] - n0[20] < -30.0);
    let (am4, _) = argmax(4.0 * kap);
    assert!(am4 as f64 > kap, "argmax {am4}");
}

#[test]
fn addition_theorem() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let kap = k(6.0);
    let unit = |rng: &mut ChaCha8Rng| {
        let x = random_point(rng, 1.0);
        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.map(|v| v / n)
    };
    let x = unit(&mut rng);
    let y = random_params(&mut rng, 10.0);
    assert!(addition_theorem_check(0, &x, &y, kap).unwrap() < 1e-16);
    for _ in 0..20 {
        let x = unit(&mut rng);
        let y = EpwParams { zeta: 0.0, ..random_params(&mut rng, 1.0) };
        assert!(addition_theorem_check(10, &x, &y, kap).unwrap() < 1e-12);
    }
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let x = unit(&mut rng);
        let y = EpwParams { zeta: 8.0, ..random_params(&mut rng, 1.0) };
        for l in 0..=15 {
            // Cauchy–Schwarz bound on the sum, the natural scale of its rounding error
            let scale = p_vector(l, 8.0, kap).unwrap().ln_norm().exp() * ((2 * l + 1) as f64 / (4.0 * PI)).sqrt();
            let r = addition_theorem_check(l, &x, &y, kap).unwrap();
            worst = worst.max(r / scale);
        }
    }
    assert!(worst < 1e-13, "{worst}");
}

/// ln ∫ |𝐏_ℓ(ζ)|² ζ^{1/2} e^{−ζ} dζ from the explicit positive sum of P_ℓ^m,
/// expanded into monomials in ζ and integrated term by term.
fn ln_moment_exact(l: usize, kappa: f64) -> f64 {
    let lnc = |n: usize, r: usize| lnf(n) - lnf(r) - lnf(n - r);
    let mut terms = Vec::new();
    for m in 0..=l {
        let ln_mult = if m == 0 { 0.0 } else { 2f64.ln() };
        let pre = 2.0 * (lnf(l + m) - lnf(l) - l as f64 * 2f64.ln()) + 2.0 * gamma_norm(l, m).ln() + ln_mult;
        for k1 in 0..=l - m {
            for k2 in 0..=l - m {
                let a = 2 * l - m - k1 - k2;
                let b = m + k1 + k2;
                let cc = lnc(l, k1) + lnc(l, m + k1) + lnc(l, k2) + lnc(l, m + k2);
                for j in 0..=b {
                    let n = a + j;
                    // t^n (2)^{b−j} with t = ζ/2κ
                    let v = pre + cc + lnc(b, j) + (b - j) as f64 * 2f64.ln()
                        - n as f64 * (2.0 * kappa).ln()
                        + ln_gamma(n as f64 + 1.5);
                    terms.push(v);
                }
            }
        }
    }
    let mx = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    mx + terms.iter().map(|t| (t - mx).exp()).sum::<f64>().ln()
}

#[test]
fn alpha_quadrature_matches_moments() {
    for &kap in &[2.0, 6.0, 16.0] {
        let la = alpha_table(20, k(kap), AlphaMode::Quadrature).unwrap();
        for l in 0..=20usize {
            let want = -0.5 * ((8.0 * PI * PI / (2 * l + 1) as f64).ln() + ln_moment_exact(l, kap));
            assert!((la[l] - want).abs() < 1e-10, "kappa={kap} l={l}: {} vs {want}", la[l]);
        }
    }
}

#[test]
fn alpha_examples() {
    let exact0 = -0.75 * PI.ln();
    let q = alpha(0, k(6.0), AlphaMode::Quadrature).unwrap();
    assert!((q.ln_abs - exact0).abs() < 1e-10);
    let a = alpha(0, k(6.0), AlphaMode::Approx).unwrap();
    let r0 = (a.ln_abs - exact0).exp();
    assert!(r0 > 0.2 && r0 < 5.0, "{r0}");
    let q20 = alpha(20, k(6.0), AlphaMode::Quadrature).unwrap();
    let a20 = alpha(20, k(6.0), AlphaMode::Approx).unwrap();
    let ratio = (a20.ln_abs - q20.ln_abs).exp();
    assert!(ratio > 0.2 && ratio < 5.0, "{ratio}");
}

#[test]
fn alpha_asymptotic_trend() {
    let kap = 6.0;
    let la = alpha_table(120, k(kap), AlphaMode::Quadrature).unwrap();
    let resid: Vec<f64> = (1..=120)
        .map(|l| {
            let lf = l as f64;
            la[l] - (lf * (std::f64::consts::E * kap / 2.0).ln() - (lf + 0.5) * lf.ln())
        })
        .collect();
    let diffs: Vec<f64> = resid.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    assert!(diffs[diffs.len() - 1] < 0.01, "{}", diffs[diffs.len() - 1]);
    // ratio to the asymptotic form stays bounded once ℓ exceeds a few κ
    let tail = &resid[19..];
    let spread = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - tail.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread < 0.5, "{spread}");
}

#[test]
fn tau_table_properties() {
    let kap = 6.0;
    let t = tau_table(30, k(kap)).unwrap();
    assert!(t.values.iter().all(|v| v.norm() > 0.0 && v.norm().is_finite()));
    let mut worst = 0.0f64;
    for l in 24..30 {
        worst = worst.max((t.values[l + 1].norm() / t.values[l].norm() - 1.0).abs());
    }
    assert!(worst < 0.1, "{worst}");
    let t4 = tau_table(20, k(4.0)).unwrap();
    let t16 = tau_table(20, k(16.0)).unwrap();
    assert!(t4.values.iter().zip(&t16.values).any(|(a, b)| (a - b).norm() > 1e-3 * a.norm()));
}

#[test]
fn tau_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let kap = k(6.0);
    let hb = HerglotzBasis::new(20, kap, AlphaMode::Quadrature).unwrap();
    let tau = tau_table(20, kap).unwrap();
    for _ in 0..20 {
        let y = random_params(&mut rng, 30.0);
        let c = jacobi_anger_coeffs(&y, kap, 20).unwrap();
        let a = hb.eval_all(&y).unwrap();
        for i in ModalIndex::all(20) {
            let want = tau.values[i.ell()] * a[i.flat()].conj();
            assert!((c.get(i) - want).norm() <= 1e-10 * want.norm() + 1e-300);
        }
    }
    let y = random_params(&mut rng, 5.0);
    let single = herglotz_density_eval(idx(3, -2), &y, kap).unwrap();
    assert!((single - hb.eval_all(&y).unwrap()[idx(3, -2).flat()]).norm() < 1e-12 * single.norm());
    let a00 = herglotz_density_eval(idx(0, 0), &y, kap).unwrap();
    let want = (hb.ln_alpha[0]).exp() / (4.0 * PI).sqrt();
    assert!((a00 - want).norm() < 1e-14);
}

/// Generalized Gauss–Laguerre rule for the weight ζ^{a} e^{−ζ} (Golub–Welsch).
fn gauss_laguerre(n: usize, a: f64) -> (Vec<f64>, Vec<f64>) {
    let mut j = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        j[[i, i]] = 2.0 * i as f64 + a + 1.0;
        if i + 1 < n {
            let b = ((i + 1) as f64 * (i as f64 + 1.0 + a)).sqrt();
            j[[i, i + 1]] = b;
            j[[i + 1, i]] = b;
        }
    }
    let (vals, vecs) = j.eigh(UPLO::Lower).unwrap();
    let mu0 = ln_gamma(a + 1.0).exp();
    (vals.to_vec(), (0..n).map(|i| mu0 * vecs[[0, i]].powi(2)).collect())
}

#[test]
fn herglotz_orthonormality() {
    let kap = k(6.0);
    let hb = HerglotzBasis::new(2, kap, AlphaMode::Quadrature).unwrap();
    let (cx, cw) = epw::quad::gauss_legendre(64);
    let (zx, zw) = gauss_laguerre(48, 0.5);
    let nu = 64;
    let pairs = [idx(1, 0), idx(2, 1)];
    let ds: Vec<_> = cx.iter().map(|c| (wigner_d(1, c.acos()), wigner_d(2, c.acos()))).collect();
    let ps: Vec<_> = zx.iter().map(|z| p_vectors(2, *z, kap).unwrap()).collect();
    let mut gram = [[Complex64::new(0.0, 0.0); 2]; 2];
    let alpha: Vec<f64> = hb.ln_alpha.iter().map(|v| v.exp()).collect();
    for (it, wt) in cw.iter().enumerate() {
        for (iz, wz) in zw.iter().enumerate() {
            for i2 in 0..nu {
                let t2 = 2.0 * PI * i2 as f64 / nu as f64;
                for ip in 0..nu {
                    let psi = 2.0 * PI * ip as f64 / nu as f64;
                    let w = wt * wz * (2.0 * PI / nu as f64).powi(2);
                    let vals: Vec<Complex64> = pairs
                        .iter()
                        .map(|i| {
                            let l = i.ell() as isize;
                            let m = i.m();
                            let d = if l == 1 { &ds[it].0 } else { &ds[it].1 };
                            let p = &ps[iz][l as usize];
                            let mut acc = Complex64::new(0.0, 0.0);
                            for mp in -l..=l {
                                acc += Complex64::cis(mp as f64 * psi) * d.get(mp, m) * p.get(mp);
                            }
                            acc * Complex64::cis(m as f64 * t2) * alpha[l as usize]
                        })
                        .collect();
                    for a in 0..2 {
                        for b in 0..2 {
                            gram[a][b] += vals[a] * vals[b].conj() * w;
                        }
                    }
                }
            }
        }
    }
    for a in 0..2 {
        for b in 0..2 {
            let want = if a == b { 1.0 } else { 0.0 };
            assert!((gram[a][b] - want).norm() < 1e-6, "{a}{b}: {}", gram[a][b]);
        }
    }
}
