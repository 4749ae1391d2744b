use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;

use super::ring::Cyclotomic;
use crate::scalar::{C64, ZERO};

/// A polynomial in one formal variable with coefficients in a cyclotomic
/// ring, lowest degree first. The zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CyclotomicPoly<R> {
    coeffs: Vec<R>,
}

impl<R: Cyclotomic> CyclotomicPoly<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        CyclotomicPoly { coeffs }
    }

    pub fn zero() -> Self {
        CyclotomicPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: R) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(R::one())
    }

    /// `c0 + c1·λ`.
    pub fn linear(c0: R, c1: R) -> Self {
        Self::new(vec![c0, c1])
    }

    /// `1 − ζ^k λ`.
    pub fn one_minus_gen(k: i64) -> Self {
        Self::linear(R::one(), -R::generator_pow(k))
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> R {
        self.coeffs.get(k).cloned().unwrap_or_else(R::zero)
    }

    pub fn scale(&self, k: &R) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * k.clone()).collect())
    }

    pub fn scale_int(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.scale(k)).collect())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Horner evaluation at a complex point.
    pub fn eval(&self, x: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(ZERO, |acc, c| acc * x + c.to_complex())
    }
}

impl<R: Cyclotomic> Add for &CyclotomicPoly<R> {
    type Output = CyclotomicPoly<R>;
    fn add(self, o: &CyclotomicPoly<R>) -> CyclotomicPoly<R> {
        let len = self.coeffs.len().max(o.coeffs.len());
        CyclotomicPoly::new((0..len).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl<R: Cyclotomic> Sub for &CyclotomicPoly<R> {
    type Output = CyclotomicPoly<R>;
    fn sub(self, o: &CyclotomicPoly<R>) -> CyclotomicPoly<R> {
        let len = self.coeffs.len().max(o.coeffs.len());
        CyclotomicPoly::new((0..len).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl<R: Cyclotomic> Neg for &CyclotomicPoly<R> {
    type Output = CyclotomicPoly<R>;
    fn neg(self) -> CyclotomicPoly<R> {
        CyclotomicPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<R: Cyclotomic> Mul for &CyclotomicPoly<R> {
    type Output = CyclotomicPoly<R>;
    fn mul(self, o: &CyclotomicPoly<R>) -> CyclotomicPoly<R> {
        if self.is_zero() || o.is_zero() {
            return CyclotomicPoly::zero();
        }
        let mut out = vec![R::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        CyclotomicPoly::new(out)
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl<R: Cyclotomic> $tr for CyclotomicPoly<R> {
            type Output = CyclotomicPoly<R>;
            fn $m(self, o: CyclotomicPoly<R>) -> CyclotomicPoly<R> {
                (&self).$m(&o)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

/// A quotient `num / den` of cyclotomic polynomials, kept unreduced.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalFunction<R> {
    pub num: CyclotomicPoly<R>,
    pub den: CyclotomicPoly<R>,
}

impl<R: Cyclotomic> RationalFunction<R> {
    /// Cross-multiplied equality, exact.
    pub fn same_as(&self, other: &RationalFunction<R>) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }

    pub fn eval(&self, x: C64) -> crate::Result<C64> {
        crate::scalar::checked_div(self.num.eval(x), self.den.eval(x), "denominator")
    }
}
