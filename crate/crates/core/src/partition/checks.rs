use alloc::vec::Vec;
use num_traits::Float;

use rand::Rng;

use super::params::AdditiveParams;
use super::Method;
use crate::error::Result;
use crate::scalar::{binom2, c, checked_div_by, nonzero, powi, rel_diff, C64, ONE};
use crate::theta::{order_norm_check_sampled, ThetaContext};

/// Which specialization of the first row and column is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recursion {
    /// `x_1 + 1 = y_1`: the dynamical parameter is kept.
    ShiftedDiagonal,
    /// `x_1 = y_1`: the smaller system sees `λ + 1`.
    Diagonal,
}

/// `Z_n` at the specialization and the prefactor times `Z_{n−1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursionSides {
    pub lhs: C64,
    pub rhs: C64,
    /// Largest [`super::TrackedSum::condition`] of the two evaluations.
    pub condition: f64,
}

impl RecursionSides {
    pub fn relative_error(&self) -> f64 {
        rel_diff(self.lhs, self.rhs)
    }
}

/// Evaluates both sides of the reduction `n → n−1` for the given branch.
/// `x_1` of `params` is overwritten by the specialization; `Z_0 = 1`.
pub fn recursion_check(
    params: &AdditiveParams,
    ctx: &ThetaContext,
    which: Recursion,
    method: Method,
) -> Result<RecursionSides> {
    let n = params.n();
    if n == 0 {
        return Err(crate::Error::domain("the recursion needs n ≥ 1"));
    }
    let mut pinned = params.clone();
    let y1 = params.y[0];
    pinned.x[0] = match which {
        Recursion::ShiftedDiagonal => y1 - 1.0,
        Recursion::Diagonal => y1,
    };
    let lhs = method.evaluate_tracked(&pinned, ctx)?;
    let mut tail = pinned.tail();
    let one_pow = powi(nonzero(ctx.bracket(ONE)?, "[1]")?, 2 * (n as i64 - 1));
    let nf = n as f64;
    let mut factor = ONE;
    let pre = match which {
        Recursion::ShiftedDiagonal => {
            for k in 1..n {
                factor *= ctx.bracket(y1 - pinned.y[k] - 1.0)? * ctx.bracket(pinned.x[k] - y1)?;
            }
            let pre = checked_div_by(
                ctx.bracket(params.lambda + nf)? * factor,
                &[ctx.bracket(params.lambda + nf - 1.0)?],
                "[λ + n − 1][1]",
            )?;
            pre / one_pow
        }
        Recursion::Diagonal => {
            for k in 1..n {
                factor *= ctx.bracket(y1 - pinned.y[k] + 1.0)? * ctx.bracket(pinned.x[k] - y1 + 1.0)?;
            }
            tail.lambda += 1.0;
            factor / one_pow
        }
    };
    let smaller = method.evaluate_tracked(&tail, ctx)?;
    Ok(RecursionSides {
        lhs: lhs.value,
        rhs: pre * smaller.value,
        condition: lhs.condition().max(smaller.condition()),
    })
}

fn shuffle<T, R: Rng + ?Sized>(v: &mut [T], rng: &mut R) {
    for i in (1..v.len()).rev() {
        let j = rng.gen_range(0..=i);
        v.swap(i, j);
    }
}

/// True iff `Z_n` is unchanged, within `tolerance`, under `trials` random
/// permutations of `x` and, independently, of `y`.
pub fn symmetry_check<R: Rng + ?Sized>(
    params: &AdditiveParams,
    ctx: &ThetaContext,
    method: Method,
    trials: usize,
    tolerance: f64,
    rng: &mut R,
) -> Result<bool> {
    let base = method.evaluate(params, ctx)?;
    for _ in 0..trials {
        let mut moved = params.clone();
        shuffle(&mut moved.x, rng);
        if rel_diff(method.evaluate(&moved, ctx)?, base) > tolerance {
            return Ok(false);
        }
        let mut moved = params.clone();
        shuffle(&mut moved.y, rng);
        if rel_diff(method.evaluate(&moved, ctx)?, base) > tolerance {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of the checks of `Z_n` as a function of `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LambdaStructure {
    /// `Z_n ∏_{j=1}^{n} [λ+j−1]` has order `n` and norm `|x|−|y|−C(n,2)`.
    pub general: bool,
    /// When `η = 1/N` with `2 ≤ N ≤ n`: `Z_n ∏_{j=1}^{N−1} [λ+n−j]` has order
    /// `N−1` and norm `|x|−|y|+n−C(N,2)`. `None` for other `η`.
    pub root_of_unity: Option<bool>,
}

/// `N` if `η = 1/N` for an integer `N ≥ 2`.
pub fn reciprocal_integer_eta(ctx: &ThetaContext) -> Option<usize> {
    let inv = ONE / ctx.eta();
    let r = Float::round(inv.re);
    if inv.im.abs() < 1e-12 && (inv.re - r).abs() < 1e-12 && r >= 2.0 {
        Some(r as usize)
    } else {
        None
    }
}

/// Checks the theta-function structure of `Z_n` in `λ`; the `λ` stored in
/// `params` is ignored. [`Error::Unresolved`] means `params` sit where the
/// evaluator cancels too heavily to judge.
pub fn lambda_structure_check<R: Rng + ?Sized>(
    params: &AdditiveParams,
    ctx: &ThetaContext,
    method: Method,
    samples: usize,
    tolerance: f64,
    rng: &mut R,
) -> Result<LambdaStructure> {
    let n = params.n();
    let diff = params.x_sum() - params.y_sum();
    let at = |lambda: C64, shifts: &[f64]| -> Result<C64> {
        let mut p = params.clone();
        p.lambda = lambda;
        let mut v = method.evaluate_tracked(&p, ctx)?.resolved()?;
        for &s in shifts {
            v *= ctx.bracket(lambda + s)?;
        }
        Ok(v)
    };
    let shifts: Vec<f64> = (0..n).map(|j| j as f64).collect();
    let general = order_norm_check_sampled(
        |l| at(l, &shifts),
        n as i64,
        diff - binom2(n) as f64,
        ctx,
        samples,
        tolerance,
        rng,
    )?;
    let root_of_unity = reciprocal_integer_eta(ctx)
        .filter(|&big_n| big_n <= n)
        .map(|big_n| {
            let shifts: Vec<f64> = (1..big_n).map(|j| (n - j) as f64).collect();
            order_norm_check_sampled(
                |l| at(l, &shifts),
                big_n as i64 - 1,
                diff + c((n - binom2(big_n)) as f64, 0.0),
                ctx,
                samples,
                tolerance,
                rng,
            )
        })
        .transpose()?;
    Ok(LambdaStructure {
        general,
        root_of_unity,
    })
}

/// Checks that `x_1 ↦ Z_n` has order `n` and norm `|y| + λ`, and that
/// `y_1 ↦ Z_n` has order `n` and norm `|x| − λ`. Unresolved as for
/// [`lambda_structure_check`].
pub fn spectral_structure_check<R: Rng + ?Sized>(
    params: &AdditiveParams,
    ctx: &ThetaContext,
    method: Method,
    samples: usize,
    tolerance: f64,
    rng: &mut R,
) -> Result<bool> {
    let n = params.n();
    if n == 0 {
        return Ok(true);
    }
    let in_x = |v: C64| {
        let mut p = params.clone();
        p.x[0] = v;
        method.evaluate_tracked(&p, ctx)?.resolved()
    };
    let in_y = |v: C64| {
        let mut p = params.clone();
        p.y[0] = v;
        method.evaluate_tracked(&p, ctx)?.resolved()
    };
    let x_rest: C64 = params.x_sum();
    let y_rest: C64 = params.y_sum();
    Ok(order_norm_check_sampled(
        in_x,
        n as i64,
        y_rest + params.lambda,
        ctx,
        samples,
        tolerance,
        rng,
    )? && order_norm_check_sampled(
        in_y,
        n as i64,
        x_rest - params.lambda,
        ctx,
        samples,
        tolerance,
        rng,
    )?)
}
