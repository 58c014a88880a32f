#![allow(dead_code)]

/// j_ℓ(r) by upward recurrence from the trigonometric forms (ℓ ≤ r) or by the
/// power series (ℓ > r). Reliable for r ≲ 8.
pub fn bessel_oracle(l: usize, r: f64) -> f64 {
    if r == 0.0 {
        return if l == 0 { 1.0 } else { 0.0 };
    }
    if (l as f64) <= r {
        let mut a = r.sin() / r;
        if l == 0 {
            return a;
        }
        let mut b = r.sin() / (r * r) - r.cos() / r;
        for k in 1..l {
            let c = (2 * k + 1) as f64 / r * b - a;
            a = b;
            b = c;
        }
        b
    } else {
        let mut lead = 1.0;
        for k in 1..=l {
            lead *= r / (2 * k + 1) as f64;
        }
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..400 {
            term *= -r * r / (2.0 * k as f64 * (2 * l + 2 * k + 1) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        lead * sum
    }
}

/// β_ℓ^{−2} = 2∫₀¹ j_ℓ(κr)² r² dr + κ^{−1} j_ℓ'(κ) j_ℓ(κ), by Gauss–Legendre quadrature.
pub fn beta_quadrature(l: usize, kappa: f64) -> f64 {
    let (x, w) = epw::quad::composite_gauss_legendre(0.0, 1.0, 8, 30);
    let vol: f64 = x
        .iter()
        .zip(&w)
        .map(|(r, wi)| wi * bessel_oracle(l, kappa * r).powi(2) * r * r)
        .sum();
    let j = bessel_oracle(l, kappa);
    let jp = l as f64 / kappa * j - bessel_oracle(l + 1, kappa);
    let inv2 = 2.0 * vol + jp * j / kappa;
    inv2.powf(-0.5)
}
