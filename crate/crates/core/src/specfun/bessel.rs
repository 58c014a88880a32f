use super::LogScaled;
use crate::error::{domain_err, Result};

const BIG: f64 = 1e250;

/// Spherical Bessel functions j_0(r), …, j_lmax(r) in log-scaled form.
///
/// Miller's downward recurrence started well above the turning point,
/// normalized against whichever of j_0, j_1 has the larger magnitude.
pub fn spherical_bessel_seq(lmax: usize, r: f64) -> Result<Vec<LogScaled>> {
    if !(r >= 0.0) || !r.is_finite() {
        return domain_err(format!("spherical Bessel argument {r} must be finite and >= 0"));
    }
    if r == 0.0 {
        let mut out = vec![LogScaled::ZERO; lmax + 1];
        out[0] = LogScaled::ONE;
        return Ok(out);
    }
    let top = lmax.max(r.ceil() as usize) + 30 + (12.0 * r.cbrt()).ceil() as usize;
    let mut mant = vec![0.0f64; lmax + 2];
    let mut scale = vec![0.0f64; lmax + 2];
    let mut run = 0.0f64;
    let mut next = 0.0f64;
    let mut cur = 1.0f64;
    let mut ell = top;
    loop {
        if ell <= lmax + 1 {
            mant[ell] = cur;
            scale[ell] = run;
        }
        if ell == 0 {
            break;
        }
        let prev = (2 * ell + 1) as f64 / r * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > BIG {
            next /= BIG;
            cur /= BIG;
            run += BIG.ln();
            // values already stored keep their own scale
        }
        ell -= 1;
    }
    let j0 = r.sin() / r;
    let j1 = r.sin() / (r * r) - r.cos() / r;
    let (k, truth) = if j0.abs() >= j1.abs() { (0, j0) } else { (1, j1) };
    Ok((0..=lmax)
        .map(|l| {
            let ratio = mant[l] / mant[k] * truth;
            if ratio == 0.0 {
                LogScaled::ZERO
            } else {
                LogScaled {
                    sign: ratio.signum() as i8,
                    ln_abs: ratio.abs().ln() + (scale[l] - scale[k]),
                }
            }
        })
        .collect())
}

/// Spherical Bessel function j_ℓ(r) for r > 0.
pub fn spherical_bessel(ell: usize, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return domain_err(format!("spherical Bessel argument {r} must be > 0"));
    }
    Ok(spherical_bessel_seq(ell, r)?[ell].value())
}
