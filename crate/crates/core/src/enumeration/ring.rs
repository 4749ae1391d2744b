use core::fmt::{self, Debug, Display};
use core::ops::{Add, Mul, Neg, Sub};
use num_traits::Float;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::scalar::{c, C64};

/// The rings `Z[ζ]` used for exact identities: elements are pairs of
/// integers `a + bζ`.
pub trait Cyclotomic:
    Clone
    + PartialEq
    + Eq
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Order of the generator `ζ` (3 for `ω`, 4 for `i`).
    const ORDER: i64;
    /// Printable name of the generator.
    const GENERATOR: &'static str;

    fn from_parts(a: BigInt, b: BigInt) -> Self;
    fn parts(&self) -> (&BigInt, &BigInt);
    /// `ζ` as a complex number.
    fn generator_value() -> C64;

    fn zero() -> Self {
        Self::from_parts(BigInt::zero(), BigInt::zero())
    }

    fn one() -> Self {
        Self::from_int(1)
    }

    fn from_int(v: impl Into<BigInt>) -> Self {
        Self::from_parts(v.into(), BigInt::zero())
    }

    fn is_zero(&self) -> bool {
        let (a, b) = self.parts();
        a.is_zero() && b.is_zero()
    }

    fn generator() -> Self {
        Self::from_parts(BigInt::zero(), BigInt::from(1))
    }

    /// `ζ^k` for any integer `k`.
    fn generator_pow(k: i64) -> Self {
        let mut acc = Self::one();
        for _ in 0..k.rem_euclid(Self::ORDER) {
            acc = acc * Self::generator();
        }
        acc
    }

    fn scale(&self, k: &BigInt) -> Self {
        let (a, b) = self.parts();
        Self::from_parts(a * k, b * k)
    }

    fn to_complex(&self) -> C64 {
        let (a, b) = self.parts();
        let f = |v: &BigInt| v.to_f64().unwrap_or(f64::NAN);
        c(f(a), 0.0) + Self::generator_value() * f(b)
    }
}

macro_rules! pair_ring {
    ($name:ident, $doc:literal) => {
        #[doc = $doc]
        #[derive(Clone, PartialEq, Eq, Hash)]
        pub struct $name {
            a: BigInt,
            b: BigInt,
        }

        impl Add for $name {
            type Output = $name;
            fn add(self, o: $name) -> $name {
                $name {
                    a: self.a + o.a,
                    b: self.b + o.b,
                }
            }
        }

        impl Sub for $name {
            type Output = $name;
            fn sub(self, o: $name) -> $name {
                $name {
                    a: self.a - o.a,
                    b: self.b - o.b,
                }
            }
        }

        impl Neg for $name {
            type Output = $name;
            fn neg(self) -> $name {
                $name {
                    a: -self.a,
                    b: -self.b,
                }
            }
        }

        impl Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                Display::fmt(self, f)
            }
        }

        impl Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(
                    f,
                    "({} + {}{})",
                    self.a,
                    self.b,
                    <$name as Cyclotomic>::GENERATOR
                )
            }
        }
    };
}

pair_ring!(
    ZOmega,
    "Eisenstein integers `a + bω`, `ω = e^{2πi/3}`, `ω² = −1 − ω`."
);
pair_ring!(ZI, "Gaussian integers `a + bi`.");

impl Mul for ZOmega {
    type Output = ZOmega;
    fn mul(self, o: ZOmega) -> ZOmega {
        let bd = &self.b * &o.b;
        ZOmega {
            a: &self.a * &o.a - &bd,
            b: &self.a * &o.b + &self.b * &o.a - bd,
        }
    }
}

impl Mul for ZI {
    type Output = ZI;
    fn mul(self, o: ZI) -> ZI {
        ZI {
            a: &self.a * &o.a - &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }
}

impl Cyclotomic for ZOmega {
    const ORDER: i64 = 3;
    const GENERATOR: &'static str = "ω";

    fn from_parts(a: BigInt, b: BigInt) -> Self {
        ZOmega { a, b }
    }

    fn parts(&self) -> (&BigInt, &BigInt) {
        (&self.a, &self.b)
    }

    fn generator_value() -> C64 {
        c(-0.5, Float::sqrt(0.75f64))
    }
}

impl Cyclotomic for ZI {
    const ORDER: i64 = 4;
    const GENERATOR: &'static str = "i";

    fn from_parts(a: BigInt, b: BigInt) -> Self {
        ZI { a, b }
    }

    fn parts(&self) -> (&BigInt, &BigInt) {
        (&self.a, &self.b)
    }

    fn generator_value() -> C64 {
        c(0.0, 1.0)
    }
}
