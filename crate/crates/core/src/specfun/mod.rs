//! Scalar special functions: Ferrers and extended associated Legendre
//! functions, spherical harmonics, spherical Bessel functions, Wigner
//! rotation matrices and the regularized upper incomplete Gamma function.
//!
//! Quantities that over- or underflow for large degree are returned as
//! [`LogScaled`] values.

mod bessel;
mod gamma;
mod legendre;
mod wigner;

pub use bessel::{spherical_bessel, spherical_bessel_seq};
pub use gamma::{ln_gamma, ln_upper_gamma_q, lower_gamma_p, upper_gamma_q};
pub use legendre::{
    assoc_legendre_ext, ferrers, legendre_p_complex, normalized_ferrers_column,
    normalized_legendre_ext_table, spherical_harmonic, spherical_harmonics_all, ModalIndex,
    TriTable,
};
pub use wigner::{wigner_D, wigner_D_all, wigner_d, wigner_d_all, wigner_d_direct, WignerBlock};

/// A real number stored as sign and natural log of its magnitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogScaled {
    pub sign: i8,
    pub ln_abs: f64,
}

impl LogScaled {
    pub const ZERO: LogScaled = LogScaled { sign: 0, ln_abs: f64::NEG_INFINITY };
    pub const ONE: LogScaled = LogScaled { sign: 1, ln_abs: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogScaled { sign: if x > 0.0 { 1 } else { -1 }, ln_abs: x.abs().ln() }
        }
    }

    pub fn positive(ln_abs: f64) -> Self {
        LogScaled { sign: 1, ln_abs }
    }

    pub fn value(&self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.ln_abs.exp()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn mul(self, other: LogScaled) -> LogScaled {
        if self.sign == 0 || other.sign == 0 {
            return Self::ZERO;
        }
        LogScaled { sign: self.sign * other.sign, ln_abs: self.ln_abs + other.ln_abs }
    }

    pub fn recip(self) -> LogScaled {
        assert!(self.sign != 0, "reciprocal of zero");
        LogScaled { sign: self.sign, ln_abs: -self.ln_abs }
    }
}

/// ln(n!) for small integer arguments, exact summation up to 170.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 170 {
        let mut acc = 1.0f64;
        for k in 2..=n {
            acc *= k as f64;
        }
        return acc.ln();
    }
    ln_gamma(n as f64 + 1.0)
}

/// Binomial coefficient in floating point (exact-ish for moderate n).
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 1..=k {
        acc = acc * (n - k + i) as f64 / i as f64;
    }
    acc
}
