use alloc::collections::BTreeMap;
use num_traits::Float;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::CyclotomicPoly;
use super::ring::{Cyclotomic, ZOmega};
use crate::error::Result;
use crate::scalar::{c, Residual, C64, ONE};
use crate::state_space::{a_n, c_n, enumerate_states};

type PolyW = CyclotomicPoly<ZOmega>;

/// Both sides of the three-colouring identity, multiplied by `(1 − λ³)^E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeColourIdentity {
    /// `Σ_states ∏_i (1 − λωⁱ)^{E − 3k_i}`.
    pub lhs: PolyW,
    /// `(1 − λω²)²(1 − λω^{n+1})²(A_n(1 + ωⁿλ²) + (−1)ⁿ C_n ω^{2n} λ)(1 − λ³)^{E − n² − 2n − 3}`.
    pub rhs: PolyW,
    /// `E = max(n² + 2n + 3, 3 max k_i)`, large enough that every state's
    /// term is a polynomial.
    pub cleared_by: u32,
}

impl ThreeColourIdentity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Exact check of `Σ_states ∏_i (1 − λωⁱ)^{−3k_i}` against its closed form,
/// where `k_i` counts height entries congruent to `i` mod 3.
pub fn three_colour_identity(n: usize, cap: usize) -> Result<ThreeColourIdentity> {
    let mut groups: BTreeMap<[usize; 3], u64> = BTreeMap::new();
    for h in enumerate_states(n, cap)? {
        *groups.entry(h.statistics().k_mod3).or_default() += 1;
    }
    let base = (n * n + 2 * n + 3) as u32;
    let top = groups
        .keys()
        .flat_map(|k| k.iter())
        .copied()
        .max()
        .unwrap_or(0) as u32;
    let e = base.max(3 * top);
    let factors = [
        PolyW::one_minus_gen(0),
        PolyW::one_minus_gen(1),
        PolyW::one_minus_gen(2),
    ];
    let mut lhs = PolyW::zero();
    for (k, count) in groups {
        let mut term = PolyW::one();
        for i in 0..3 {
            term = &term * &factors[i].pow(e - 3 * k[i] as u32);
        }
        lhs = &lhs + &term.scale_int(&BigInt::from(count));
    }
    let n_i = n as i64;
    let an = BigInt::from(a_n(n));
    let sign = if n.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    let core = PolyW::new(alloc::vec![
        ZOmega::from_int(an.clone()),
        ZOmega::generator_pow(2 * n_i).scale(&(sign * BigInt::from(c_n(n)))),
        ZOmega::generator_pow(n_i).scale(&an),
    ]);
    let cube = &(&factors[0] * &factors[1]) * &factors[2];
    let rhs = &(&(&factors[2].pow(2) * &PolyW::one_minus_gen(n_i + 1).pow(2)) * &core)
        * &cube.pow(e - base);
    Ok(ThreeColourIdentity {
        lhs,
        rhs,
        cleared_by: e,
    })
}

/// Colour statistics of the three-colourings with domain wall boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColourReport {
    pub n: usize,
    /// `K_i = Σ_states k_i`, from the closed-form probabilities.
    pub k: [BigInt; 3],
    /// `p_i = K_i / ((n+1)² A_n)`.
    pub p: [BigRational; 3],
    pub a_n: BigUint,
    pub c_n: BigUint,
}

/// `C_n / A_n = ∏_{j=1}^{n} (3j−1)/(3j−2) = (2/3)_n / (1/3)_n`.
pub fn cn_over_an(n: usize) -> BigRational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 1..=n as i64 {
        num *= 3 * j - 1;
        den *= 3 * j - 2;
    }
    BigRational::new(num, den)
}

/// The closed-form probabilities `p_i`, case split on `n mod 3`.
pub fn colour_probabilities_closed(n: usize) -> [BigRational; 3] {
    let r = cn_over_an(n);
    let third = BigRational::new(1.into(), 3.into());
    let m = BigRational::from_integer(BigInt::from(9 * (n as i64 + 1) * (n as i64 + 1)));
    let s = if n.is_multiple_of(2) {
        BigRational::one()
    } else {
        -BigRational::one()
    };
    let int = |v: i64| BigRational::from_integer(v.into());
    // 1/3 + a/m + sign·b·r/m
    let form = |a: i64, b: i64| &third + int(a) / &m + &s * int(b) * &r / &m;
    let (big, small) = (form(4, 2), form(-2, -1));
    match n % 3 {
        0 => [big, small.clone(), small],
        1 => {
            let p01 = form(4, -1);
            [p01.clone(), p01, form(-8, 2)]
        }
        _ => [small.clone(), big, small],
    }
}

/// The closed-form colour statistics; `K_i` follow from `p_i`.
pub fn colour_probabilities(n: usize) -> ColourReport {
    let p = colour_probabilities_closed(n);
    let an = a_n(n);
    let total =
        BigRational::from_integer(BigInt::from((n + 1) * (n + 1)) * BigInt::from(an.clone()));
    let k = p.clone().map(|pi| {
        let v = pi * &total;
        debug_assert!(v.is_integer());
        v.to_integer()
    });
    ColourReport {
        n,
        k,
        p,
        a_n: an,
        c_n: c_n(n),
    }
}

/// `K_i = Σ_states k_i` by enumeration.
pub fn colour_counts(n: usize, cap: usize) -> Result<[BigUint; 3]> {
    let mut k = [0u64; 3];
    for h in enumerate_states(n, cap)? {
        let s = h.statistics();
        for i in 0..3 {
            k[i] += s.k_mod3[i] as u64;
        }
    }
    Ok(k.map(BigUint::from))
}

/// Floating-point value of a (possibly huge) rational.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    let (num, den) = (r.numer(), r.denom());
    if num.is_zero() {
        return 0.0;
    }
    let top = |v: &BigInt| {
        let shift = v.bits().saturating_sub(60);
        (
            (v.abs() >> shift).to_f64().unwrap_or(f64::NAN),
            shift as i32,
        )
    };
    let ((a, sa), (b, sb)) = (top(num), top(den));
    let v = a / b * Float::powi(2f64, sa - sb);
    if num.is_negative() != den.is_negative() {
        -v
    } else {
        v
    }
}

/// `max_i |p_i − 1/3| · n^{5/3}` from the closed forms.
pub fn colour_deviation(n: usize) -> f64 {
    let third = BigRational::new(1.into(), 3.into());
    let nf = n as f64;
    colour_probabilities_closed(n)
        .iter()
        .map(|pi| rational_to_f64(&(pi - &third)).abs() * Float::powf(nf, 5.0 / 3.0))
        .fold(0.0, f64::max)
}

/// `(1/x₀ + 1/x₁ + 1/x₂)³ − 27/(x₀x₁x₂)` at `x_i = t/(1 − λωⁱ)³`.
pub fn constraint_check(lambda: C64, t: C64) -> Residual {
    let w = ZOmega::generator_value();
    let x: [C64; 3] = core::array::from_fn(|i| t / (ONE - lambda * w.powu(i as u32)).powu(3));
    let lhs = (ONE / x[0] + ONE / x[1] + ONE / x[2]).powu(3);
    let rhs = c(27.0, 0.0) / (x[0] * x[1] * x[2]);
    Residual::of_sides(lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state_space::DEFAULT_STATE_CAP;

    #[test]
    fn three_colour_small() {
        for n in 1..=4 {
            let id = three_colour_identity(n, DEFAULT_STATE_CAP).unwrap();
            assert!(id.holds(), "n={n}");
            assert_eq!(id.lhs.coeff(0), ZOmega::from_int(BigInt::from(a_n(n))));
        }
    }

    #[test]
    fn probabilities_match_enumeration() {
        let r = colour_probabilities(1);
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(r.p, [half.clone(), half, BigRational::zero()]);
        for n in 1..=5 {
            let r = colour_probabilities(n);
            let k = colour_counts(n, DEFAULT_STATE_CAP).unwrap();
            assert_eq!(r.k, k.map(BigInt::from), "n={n}");
            let total: BigRational = r.p.iter().cloned().sum();
            assert!(total.is_one());
        }
    }

    #[test]
    fn deviation_bounded() {
        let worst = (1..=200).map(colour_deviation).fold(0.0, f64::max);
        assert!(worst < 1.0, "{worst}");
    }

    #[test]
    fn big_rational_conversion() {
        let r = BigRational::new(
            BigInt::from(10).pow(400) + 1,
            BigInt::from(3) * BigInt::from(10).pow(400),
        );
        assert!((rational_to_f64(&r) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            rational_to_f64(&BigRational::new((-1).into(), 4.into())),
            -0.25
        );
    }

    #[test]
    fn constraint_surface() {
        assert_eq!(constraint_check(c(0.0, 0.0), c(2.0, 0.0)).diff, c(0.0, 0.0));
        for (l, t) in [(c(0.3, 0.4), c(1.0, 0.0)), (c(-0.7, 0.2), c(0.2, -3.0))] {
            assert!(constraint_check(l, t).relative() < 1e-10);
        }
    }
}
