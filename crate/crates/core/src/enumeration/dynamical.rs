use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;

use super::poly::{CyclotomicPoly, RationalFunction};
use super::ring::{Cyclotomic, ZOmega};
use crate::error::{Error, Result};
use crate::partition::{z_tilde_capped, MultiplicativeParams};
use crate::scalar::{binom2, c, checked_div, checked_div_by, powi, rel_diff, C64, ONE};
use crate::state_space::{a_n, c_n, enumerate_states, BlockKind, HeightMatrix};
use crate::theta::linalg::solve2;
use crate::theta::ThetaContext;

type PolyW = CyclotomicPoly<ZOmega>;

fn signed(v: BigUint) -> BigInt {
    BigInt::from(v)
}

/// `ω^{C(n+1,2)} (A_n(1 + ωⁿλ²) + (−1)ⁿ C_n ω^{2n} λ)`.
fn closed_numerator(n: usize) -> PolyW {
    let n_i = n as i64;
    let an = signed(a_n(n));
    let cn = signed(c_n(n));
    let sgn = if n.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    let p = PolyW::new(alloc::vec![
        ZOmega::from_int(an.clone()),
        ZOmega::generator_pow(2 * n_i).scale(&(sgn * cn)),
        ZOmega::generator_pow(n_i).scale(&an),
    ]);
    p.scale(&ZOmega::generator_pow(binom2(n + 1) as i64))
}

/// The closed form of `Z̃_n(ω, …, ω; 1, …, 1; λ)` at `p = 0`, `q = ω`, as an
/// exact rational function of `λ`:
/// `ω^{C(n+1,2)} (A_n(1 + ωⁿλ²) + (−1)ⁿ C_n ω^{2n} λ) / ((1 − λω^{n+1})(1 − λω^{n+2}))`.
pub fn dynamical_closed_form(n: usize) -> RationalFunction<ZOmega> {
    let n_i = n as i64;
    RationalFunction {
        num: closed_numerator(n),
        den: &PolyW::one_minus_gen(n_i + 1) * &PolyW::one_minus_gen(n_i + 2),
    }
}

/// Complex evaluation of [`dynamical_closed_form`].
pub fn dynamical_enumerate(n: usize, lambda: C64) -> Result<C64> {
    let f = dynamical_closed_form(n);
    checked_div(
        f.num.eval(lambda),
        f.den.eval(lambda),
        "(1 − λω^{n+1})(1 − λω^{n+2})",
    )
}

/// Block weight of `Z̃_n(ω, …; 1, …; λ)` at `p = 0`, `q = ω`, times `1 − λ³`.
fn cleared_block(kind: BlockKind, a: i64) -> PolyW {
    let f = |k: i64| PolyW::one_minus_gen(a + k);
    let w = ZOmega::generator();
    match kind {
        // (1 − ω²)/(1 − ω) = −ω²
        BlockKind::UpUp | BlockKind::DownDown => {
            &(&(&f(0) * &f(1)) * &f(2)) * &PolyW::constant(-ZOmega::generator_pow(2))
        }
        BlockKind::PlusMinusPlusMinus | BlockKind::MinusPlusPlusMinus => &(&f(1) * &f(1)) * &f(2),
        BlockKind::MinusPlusMinusPlus | BlockKind::PlusMinusMinusPlus => {
            (&(&f(2) * &f(1)) * &f(2)).scale(&w)
        }
    }
}

/// Both sides of the `p = 0`, `q = ω` evaluation, multiplied by `(1 − λ³)^{n²}`
/// so that each is a polynomial in `λ` over `Z[ω]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClearedIdentity {
    /// The state sum.
    pub lhs: CyclotomicPoly<ZOmega>,
    /// The closed form.
    pub rhs: CyclotomicPoly<ZOmega>,
    /// The power of `1 − λ³` both sides were multiplied by.
    pub cleared_by: u32,
}

impl ClearedIdentity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Exact state sum for `Z̃_n(ω, …, ω; 1, …, 1; λ)` at `p = 0`, `q = ω` against
/// the closed form, both cleared by `(1 − λ³)^{n²}`.
pub fn dynamical_identity(n: usize, cap: usize) -> Result<ClearedIdentity> {
    let table: Vec<PolyW> = BlockKind::ALL
        .iter()
        .flat_map(|&k| (0..3).map(move |a| cleared_block(k, a)))
        .collect();
    // states sharing the multiset of (kind, a mod 3) give equal terms
    let mut groups: BTreeMap<[u8; 18], u64> = BTreeMap::new();
    for h in enumerate_states(n, cap)? {
        let mut key = [0u8; 18];
        for i in 0..n {
            for j in 0..n {
                let a = h.get(i, j).rem_euclid(3) as usize;
                key[h.block_kind(i, j).index() * 3 + a] += 1;
            }
        }
        *groups.entry(key).or_default() += 1;
    }
    let mut lhs = PolyW::zero();
    for (key, count) in groups {
        let mut term = PolyW::one();
        for (slot, &m) in key.iter().enumerate() {
            if m > 0 {
                term = &term * &table[slot].pow(m as u32);
            }
        }
        lhs = &lhs + &term.scale_int(&BigInt::from(count));
    }
    let n_i = n as i64;
    let cube = &(&PolyW::one_minus_gen(0) * &PolyW::one_minus_gen(1)) * &PolyW::one_minus_gen(2);
    let nn = (n * n) as u32;
    let rhs = if n == 0 {
        PolyW::one()
    } else {
        &(&closed_numerator(n) * &PolyW::one_minus_gen(n_i)) * &cube.pow(nn - 1)
    };
    Ok(ClearedIdentity {
        lhs,
        rhs,
        cleared_by: nn,
    })
}

/// Both sides of the Kuperberg-type specialization together with the
/// induced weight `t` per −1 entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KuperbergSides {
    /// `Z̃_n(s^{−1}, …, s^{−1}; 1, …, 1; λ)` by state enumeration.
    pub lhs: C64,
    /// The weighted state sum over `t^N` with one theta quotient per block.
    pub rhs: C64,
    /// `t = s^{−1} θ(q)² / θ(s)²`.
    pub t: C64,
}

impl KuperbergSides {
    pub fn relative_error(&self) -> f64 {
        rel_diff(self.lhs, self.rhs)
    }
}

/// `t = s^{−1} θ(q)² / θ(s)²` for a chosen square root `s` of `q`.
pub fn kuperberg_t(s: C64, ctx: &ThetaContext) -> Result<C64> {
    let th_s = ctx.theta(s)?;
    checked_div_by(ctx.theta(ctx.q())?.powu(2), &[s, th_s, th_s], "θ(q^{1/2})")
}

/// Evaluates both sides of the specialization `x_i = s^{−1}`, `y_i = 1`,
/// where `s² = q` is passed explicitly:
///
/// `Z̃_n = s^{−C(n+1,2)} t^{−C(n,2)} Σ t^N ∏ θ(λ s^{(3a+3b−c−d)/2}) / θ(λ s^{2a})`.
pub fn kuperberg_specialize(
    n: usize,
    ctx: &ThetaContext,
    lambda: C64,
    s: C64,
    cap: usize,
) -> Result<KuperbergSides> {
    let q = ctx.q();
    if (s * s - q).norm() > 1e-12 * q.norm().max(1.0) {
        return Err(Error::domain(format!(
            "s = {s} is not a square root of q = {q}"
        )));
    }
    let t = kuperberg_t(s, ctx)?;
    let params = MultiplicativeParams::new(alloc::vec![ONE / s; n], alloc::vec![ONE; n], lambda)?;
    let lhs = if n == 0 {
        ONE
    } else {
        z_tilde_capped(&params, ctx, cap)?
    };

    let mut sum = c(0.0, 0.0);
    if n == 0 {
        sum = ONE;
    } else {
        for h in enumerate_states(n, cap)? {
            sum += state_term(&h, ctx, lambda, s, t)?;
        }
    }
    let pre = powi(s, -(binom2(n + 1) as i64)) * powi(t, -(binom2(n) as i64));
    Ok(KuperbergSides {
        lhs,
        rhs: pre * sum,
        t,
    })
}

fn state_term(h: &HeightMatrix, ctx: &ThetaContext, lambda: C64, s: C64, t: C64) -> Result<C64> {
    let n = h.n();
    let mut w = ONE;
    let mut minus = 0i64;
    for i in 0..n {
        for j in 0..n {
            let (a, b, cc, d) = h.block(i, j);
            if h.block_kind(i, j) == BlockKind::MinusPlusPlusMinus {
                minus += 1;
            }
            let e = 3 * (a + b) - cc - d;
            w *= checked_div(
                ctx.theta(lambda * powi(s, (e / 2) as i64))?,
                ctx.theta(lambda * powi(s, 2 * a as i64))?,
                &format!("θ(λq^{a})"),
            )?;
        }
    }
    Ok(w * powi(t, minus))
}

/// The limit determinant
/// `(−1)^{C(n,2)} ∏_{i,j} (k + l(j−i)) / (lⁿ ∏_{i,j} (n + j − i))`.
pub fn kuperberg_limit_det(n: usize, k: i64, l: i64) -> Result<BigRational> {
    if l == 0 {
        return Err(Error::domain("l must be nonzero"));
    }
    let mut num = if binom2(n).is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    let mut den = BigInt::from(l).pow(n as u32);
    for i in 1..=n as i64 {
        for j in 1..=n as i64 {
            num *= BigInt::from(k + l * (j - i));
            den *= BigInt::from(n as i64 + j - i);
        }
    }
    Ok(BigRational::new(num, den))
}

/// `3^{−C(n+1,2)} v` as an exact rational.
pub fn third_power_scaled(n: usize, v: BigUint) -> BigRational {
    BigRational::new(BigInt::from(v), BigInt::from(3).pow(binom2(n + 1) as u32))
}

/// Coefficients of `Z̃_n(ω, …; 1, …; λ)` at `q = ω` in the basis
/// `θ(−ωⁿλ²; p²)/θ(λω^{n+1}, λω^{n+2})` and
/// `λ θ(−pωⁿλ²; p²)/θ(λω^{n+1}, λω^{n+2})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XYProbe {
    pub x: C64,
    pub y: C64,
    /// Relative mismatch when the fitted pair is used to predict the value at
    /// a third `λ`.
    pub check: f64,
}

/// The sample points used by [`elliptic_xy_probe`].
pub const XY_PROBE_LAMBDAS: [C64; 3] = [
    C64 { re: 0.31, im: 0.22 },
    C64 {
        re: -0.43,
        im: 0.27,
    },
    C64 {
        re: 0.17,
        im: -0.38,
    },
];

/// Fits the two `λ`-independent coefficients of `Z̃_n(ω, …; 1, …; λ)` at
/// `q = ω` and nome `p` from state sums at two values of `λ`, then checks the
/// fit at a third.
pub fn elliptic_xy_probe(n: usize, p: C64, cap: usize) -> Result<XYProbe> {
    if p.norm() > 0.5 {
        return Err(Error::domain(format!("|p| = {} exceeds 0.5", p.norm())));
    }
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let ctx = ThetaContext::new(p, c(1.0 / 3.0, 0.0))?;
    let nome2 = ctx.nome().pow(2);
    let w = ctx.q();
    let wn = ctx.q_pow(c(n as f64, 0.0));
    let basis = |lambda: C64| -> Result<([C64; 2], C64)> {
        let params = MultiplicativeParams::new(alloc::vec![w; n], alloc::vec![ONE; n], lambda)?;
        let z = z_tilde_capped(&params, &ctx, cap)?;
        let den = [ctx.theta(lambda * wn * w)?, ctx.theta(lambda * wn * w * w)?];
        let l2 = lambda * lambda;
        let bx = checked_div_by(nome2.theta(-wn * l2)?, &den, "θ(λω^{n+1}, λω^{n+2})")?;
        let by = checked_div_by(
            lambda * nome2.theta(-p * wn * l2)?,
            &den,
            "θ(λω^{n+1}, λω^{n+2})",
        )?;
        Ok(([bx, by], z))
    };
    let (r0, z0) = basis(XY_PROBE_LAMBDAS[0])?;
    let (r1, z1) = basis(XY_PROBE_LAMBDAS[1])?;
    let [x, y] = solve2([r0, r1], [z0, z1])?;
    let (r2, z2) = basis(XY_PROBE_LAMBDAS[2])?;
    let check = rel_diff(x * r2[0] + y * r2[1], z2);
    Ok(XYProbe { x, y, check })
}

/// The `p → 0` values of the probe: `ω^{C(n+1,2)} A_n` and
/// `ω^{C(n+1,2)} (−1)ⁿ C_n ω^{2n}`.
pub fn xy_trigonometric_limit(n: usize) -> (C64, C64) {
    let f = closed_numerator(n);
    (f.coeff(0).to_complex(), f.coeff(1).to_complex())
}

impl ClearedIdentity {
    /// `true` if the constant coefficient of both sides equals `value`.
    pub fn constant_term_is(&self, value: &ZOmega) -> bool {
        self.lhs.coeff(0) == *value && self.rhs.coeff(0) == *value
    }
}

/// The `λ = 0` value of the cleared state sum, `ω^{C(n+1,2)} A_n`.
pub fn dynamical_constant_term(n: usize) -> ZOmega {
    ZOmega::generator_pow(binom2(n + 1) as i64).scale(&signed(a_n(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::z_tilde;
    use crate::state_space::DEFAULT_STATE_CAP;

    #[test]
    fn exact_identity_small_n() {
        for n in 1..=4 {
            let id = dynamical_identity(n, DEFAULT_STATE_CAP).unwrap();
            assert!(id.holds(), "n={n}");
        }
    }

    #[test]
    fn complex_matches_state_sum() {
        let ctx = ThetaContext::trigonometric(c(1.0 / 3.0, 0.0)).unwrap();
        for n in 1..=4 {
            for lambda in [c(0.0, 0.0), c(0.4, -0.3), c(-1.2, 0.5)] {
                let m =
                    MultiplicativeParams::new(alloc::vec![ctx.q(); n], alloc::vec![ONE; n], lambda)
                        .unwrap();
                let z = z_tilde(&m, &ctx).unwrap();
                let want = dynamical_enumerate(n, lambda).unwrap();
                assert!(rel_diff(z, want) < 1e-10, "n={n} λ={lambda}");
            }
        }
        let at_zero = dynamical_enumerate(3, c(0.0, 0.0)).unwrap();
        assert!(rel_diff(at_zero, ZOmega::generator_pow(6).to_complex() * 7.0) < 1e-14);
        let pole = ZOmega::generator_pow(-4).to_complex();
        assert!(matches!(
            dynamical_enumerate(3, pole),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn constant_term_carries_phase() {
        for n in 1..=4 {
            let id = dynamical_identity(n, DEFAULT_STATE_CAP).unwrap();
            assert!(id.constant_term_is(&dynamical_constant_term(n)), "n={n}");
        }
        // ω^{C(2,2)} = ω, so the n = 1 constant is not the bare integer A_1
        assert_ne!(dynamical_constant_term(1), ZOmega::one());
        assert_eq!(dynamical_constant_term(2), ZOmega::from_int(2));
    }

    #[test]
    fn kuperberg_sides_agree() {
        let ctx = ThetaContext::new(c(0.2, 0.0), c(0.23, 0.04)).unwrap();
        let s = crate::scalar::epi(ctx.eta());
        for n in 1..=4 {
            for root in [s, -s] {
                let k =
                    kuperberg_specialize(n, &ctx, c(0.37, 0.21), root, DEFAULT_STATE_CAP).unwrap();
                assert!(k.relative_error() < 1e-9, "n={n}: {k:?}");
            }
        }
        let trig = ThetaContext::trigonometric(c(0.23, 0.0)).unwrap();
        let s = crate::scalar::epi(trig.eta());
        let t = kuperberg_t(s, &trig).unwrap();
        assert!(rel_diff(t, s + ONE / s + 2.0) < 1e-14);
    }

    #[test]
    fn limit_det_values() {
        assert_eq!(
            kuperberg_limit_det(2, 1, 3).unwrap(),
            BigRational::new(2.into(), 27.into())
        );
        assert_eq!(
            kuperberg_limit_det(2, 2, 3).unwrap(),
            BigRational::new(5.into(), 27.into())
        );
        assert_eq!(
            kuperberg_limit_det(1, 1, 3).unwrap(),
            BigRational::new(1.into(), 3.into())
        );
        for n in 1..=12 {
            assert_eq!(
                kuperberg_limit_det(n, 1, 3).unwrap(),
                third_power_scaled(n, a_n(n))
            );
            assert_eq!(
                kuperberg_limit_det(n, 2, 3).unwrap(),
                third_power_scaled(n, c_n(n))
            );
        }
        assert!(kuperberg_limit_det(2, 1, 0).is_err());
    }

    #[test]
    fn xy_probe_limits() {
        for n in 1..=3 {
            let probe = elliptic_xy_probe(n, c(1e-7, 0.0), DEFAULT_STATE_CAP).unwrap();
            let (x0, y0) = xy_trigonometric_limit(n);
            assert!(rel_diff(probe.x, x0) < 1e-5, "n={n}: {probe:?} vs {x0}");
            assert!(rel_diff(probe.y, y0) < 1e-5, "n={n}: {probe:?} vs {y0}");
            let far = elliptic_xy_probe(n, c(0.3, 0.1), DEFAULT_STATE_CAP).unwrap();
            assert!(far.check < 1e-7, "n={n}: {far:?}");
        }
    }
}
