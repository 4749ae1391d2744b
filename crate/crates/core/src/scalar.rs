//! Complex scalar helpers shared by every numeric module.

use alloc::format;
use core::f64::consts::PI;

use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Largest cancellation factor (`Σ |terms| / |sum|`, or a determinant's
/// Hadamard bound over its modulus) at which a `1e−9` relative comparison is
/// still meaningful in double precision. Checks resample past it.
pub const RESOLVABLE_CONDITION: f64 = 1e6;

/// Denominators with modulus at or below this are reported as poles.
pub const POLE_EPS: f64 = 1e-13;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `e^{2πi z}`.
#[inline]
pub fn e2pi(z: C64) -> C64 {
    (C64::new(0.0, 2.0 * PI) * z).exp()
}

/// `e^{πi z}`.
#[inline]
pub fn epi(z: C64) -> C64 {
    (C64::new(0.0, PI) * z).exp()
}

#[inline]
pub fn is_finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub fn check_finite(z: C64, what: &str) -> Result<C64> {
    if is_finite(z) {
        Ok(z)
    } else {
        Err(Error::Numeric(format!("{what} is not finite")))
    }
}

/// Divides, reporting a pole when the denominator is (numerically) zero.
/// For a product of factors use [`checked_div_by`].
pub fn checked_div(num: C64, den: C64, factor: &str) -> Result<C64> {
    Ok(num / nonzero(den, factor)?)
}

/// `z` itself, or a pole error naming `factor` when `z` is (numerically) zero.
pub fn nonzero(z: C64, factor: &str) -> Result<C64> {
    if z.norm() <= POLE_EPS || !is_finite(z) {
        return Err(Error::pole(factor));
    }
    Ok(z)
}

/// `num / ∏ factors`. Each factor is tested for a pole on its own, so a
/// product of many moderate factors is never mistaken for a zero.
pub fn checked_div_by(num: C64, factors: &[C64], factor: &str) -> Result<C64> {
    let mut den = ONE;
    for &f in factors {
        den *= nonzero(f, factor)?;
    }
    Ok(num / den)
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: C64, b: C64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Integer power by repeated squaring; negative exponents invert.
pub fn powi(z: C64, k: i64) -> C64 {
    if k < 0 {
        return ONE / powi(z, -k);
    }
    let mut base = z;
    let mut e = k as u64;
    let mut acc = ONE;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// Sign `(-1)^k`.
#[inline]
pub fn sign(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

#[inline]
pub fn binom2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// A difference between the two sides of an identity, together with the
/// largest magnitude among the terms that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub diff: C64,
    pub scale: f64,
}

impl Residual {
    pub fn new(diff: C64, scale: f64) -> Self {
        Residual { diff, scale }
    }

    pub fn of_sides(lhs: C64, rhs: C64) -> Self {
        Residual {
            diff: lhs - rhs,
            scale: lhs.norm().max(rhs.norm()),
        }
    }

    /// `|diff| / scale`, or `|diff|` when every term vanished.
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.diff.norm()
        } else {
            self.diff.norm() / self.scale
        }
    }
}

/// Principal `log(z) / (2πi)`.
pub fn log_2pi_i(z: C64) -> C64 {
    z.ln() / C64::new(0.0, 2.0 * PI)
}
