use alloc::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use super::poly::CyclotomicPoly;
use super::ring::{Cyclotomic, ZI};
use crate::error::Result;
use crate::scalar::binom2;
use crate::state_space::enumerate_states;

type PolyI = CyclotomicPoly<ZI>;

/// Both sides of the dynamical 2-enumeration, as exact polynomials over `Z[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoEnumeration {
    /// `Σ_states 2^N (1+λ)^{m₀}(1+iλ)^{m₁}(1−λ)^{m₂}(1−iλ)^{m₃}`.
    pub lhs: PolyI,
    /// `2^{C(n,2)}` times the product for `n mod 4`.
    pub rhs: PolyI,
}

impl TwoEnumeration {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// `1 + i^k λ`.
fn one_plus(k: i64) -> PolyI {
    PolyI::linear(ZI::one(), ZI::generator_pow(k))
}

/// The closed form `2^{C(n,2)} · {(1−λ²)^{n²/2}, (1+iλ)(1−λ²)^{(n²−1)/2},
/// (1−λ)^{(n²+2)/2}(1+λ)^{(n²−2)/2}, (1−iλ)(1−λ²)^{(n²−1)/2}}` for
/// `n ≡ 0, 1, 2, 3 (mod 4)`.
pub fn two_enumeration_closed(n: usize) -> PolyI {
    let sq = (n * n) as u32;
    let one_minus_sq = &one_plus(0) * &one_plus(2);
    let body = match n % 4 {
        0 => one_minus_sq.pow(sq / 2),
        1 => &one_plus(1) * &one_minus_sq.pow((sq - 1) / 2),
        2 => &one_plus(2).pow((sq + 2) / 2) * &one_plus(0).pow((sq - 2) / 2),
        _ => &one_plus(3) * &one_minus_sq.pow((sq - 1) / 2),
    };
    body.scale_int(&(BigInt::one() << binom2(n)))
}

/// Exact state sum against the closed form.
pub fn two_enumeration(n: usize, cap: usize) -> Result<TwoEnumeration> {
    let mut groups: BTreeMap<(usize, [usize; 4]), u64> = BTreeMap::new();
    for h in enumerate_states(n, cap)? {
        let s = h.statistics();
        *groups.entry((s.n_minus, s.m_mod8)).or_default() += 1;
    }
    let mut lhs = PolyI::zero();
    for ((minus, m), count) in groups {
        let mut term = PolyI::one();
        for (k, &e) in m.iter().enumerate() {
            term = &term * &one_plus(k as i64).pow(e as u32);
        }
        lhs = &lhs + &term.scale_int(&(BigInt::from(count) << minus));
    }
    Ok(TwoEnumeration {
        lhs,
        rhs: two_enumeration_closed(n),
    })
}

/// `(Σ 2^N (m₂ − m₀), Σ 2^N (m₃ − m₁))` by enumeration.
pub fn two_enumeration_moments(n: usize, cap: usize) -> Result<(BigInt, BigInt)> {
    let mut s20 = BigInt::from(0);
    let mut s31 = BigInt::from(0);
    for h in enumerate_states(n, cap)? {
        let s = h.statistics();
        let w = BigInt::one() << s.n_minus;
        let m = s.m_mod8.map(|v| v as i64);
        s20 += &w * (m[2] - m[0]);
        s31 += &w * (m[3] - m[1]);
    }
    Ok((s20, s31))
}

/// The closed values of the two moments: `2·2^{C(n,2)}` for `n ≡ 2 (mod 4)`
/// and `(−1)^{(n+1)/2} 2^{C(n,2)}` for odd `n`, zero otherwise.
pub fn two_enumeration_moments_closed(n: usize) -> (BigInt, BigInt) {
    let base = BigInt::one() << binom2(n);
    let s20 = if n % 4 == 2 {
        &base * 2
    } else {
        BigInt::from(0)
    };
    let s31 = if n % 2 == 1 {
        if n.div_ceil(2).is_multiple_of(2) {
            base
        } else {
            -base
        }
    } else {
        BigInt::from(0)
    };
    (s20, s31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state_space::DEFAULT_STATE_CAP;

    #[test]
    fn identity_holds() {
        for n in 1..=5 {
            let t = two_enumeration(n, DEFAULT_STATE_CAP).unwrap();
            assert!(t.holds(), "n={n}");
            assert_eq!(t.lhs.coeff(0), ZI::from_int(BigInt::one() << binom2(n)));
        }
    }

    #[test]
    fn n2_closed_form() {
        // 2(1−λ)³(1+λ)
        let want = (&one_plus(2).pow(3) * &one_plus(0)).scale_int(&BigInt::from(2));
        assert_eq!(two_enumeration_closed(2), want);
    }

    #[test]
    fn moments() {
        assert_eq!(two_enumeration_moments_closed(2), (4.into(), 0.into()));
        assert_eq!(two_enumeration_moments_closed(1), (0.into(), (-1).into()));
        assert_eq!(two_enumeration_moments_closed(4), (0.into(), 0.into()));
        for n in 1..=6 {
            assert_eq!(
                two_enumeration_moments(n, DEFAULT_STATE_CAP).unwrap(),
                two_enumeration_moments_closed(n),
                "n={n}"
            );
        }
    }
}
