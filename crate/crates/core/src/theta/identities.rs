//! Residual forms of the classical theta-function identities, plus the
//! quasi-periodicity test that characterises theta functions of given order
//! and norm.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use super::linalg::SquareMatrix;
use super::{Convention, ThetaContext};
use crate::error::{Error, Result};
use crate::scalar::{
    binom2, c, checked_div, e2pi, epi, powi, rel_diff, sign, Residual, C64, ONE, POLE_EPS, ZERO,
};

/// `[x+u,x−u,y+v,y−v] − [x+v,x−v,y+u,y−u] − [x+y,x−y,u+v,u−v]`.
pub fn addition_residual(x: C64, y: C64, u: C64, v: C64, ctx: &ThetaContext) -> Result<Residual> {
    let t1 = ctx.bracket_product(&[x + u, x - u, y + v, y - v])?;
    let t2 = ctx.bracket_product(&[x + v, x - v, y + u, y - u])?;
    let t3 = ctx.bracket_product(&[x + y, x - y, u + v, u - v])?;
    let scale = t1.norm().max(t2.norm()).max(t3.norm());
    Ok(Residual::new(t1 - t2 - t3, scale))
}

/// Both sides of the Frobenius determinant evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrobeniusSides {
    /// The determinant, computed by pivoted elimination.
    pub lhs: C64,
    /// The closed product.
    pub rhs: C64,
    /// Hadamard bound on `|det|`: the product of the row norms.
    pub hadamard: f64,
}

impl FrobeniusSides {
    pub fn relative_error(&self) -> f64 {
        rel_diff(self.lhs, self.rhs)
    }

    /// How far the determinant sits below its Hadamard bound. Rounding in the
    /// entries is amplified by roughly this factor, so `ε · condition()` is the
    /// best relative agreement double precision can resolve.
    pub fn condition(&self) -> f64 {
        self.hadamard / self.rhs.norm()
    }
}

/// Frobenius' elliptic Cauchy determinant in either convention.
///
/// Additive: `det([x_i−y_j+t]/[x_i−y_j])`. Multiplicative:
/// `det(θ(t x_i/y_j)/θ(x_i/y_j))`, where `x`, `y`, `t` are the multiplicative
/// variables.
pub fn frobenius_det(
    x: &[C64],
    y: &[C64],
    t: C64,
    ctx: &ThetaContext,
    convention: Convention,
) -> Result<FrobeniusSides> {
    match convention {
        Convention::Additive => frobenius_det_additive(x, y, t, ctx),
        Convention::Multiplicative => frobenius_det_multiplicative(x, y, t, ctx),
    }
}

fn check_square(x: &[C64], y: &[C64]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::Validation(format!(
            "x has {} entries but y has {}",
            x.len(),
            y.len()
        )));
    }
    Ok(x.len())
}

fn frobenius_det_additive(
    x: &[C64],
    y: &[C64],
    t: C64,
    ctx: &ThetaContext,
) -> Result<FrobeniusSides> {
    let n = check_square(x, y)?;
    let mut den = Vec::with_capacity(n * n);
    for (i, &xi) in x.iter().enumerate() {
        for (j, &yj) in y.iter().enumerate() {
            let d = ctx.bracket(xi - yj)?;
            if d.norm() <= POLE_EPS {
                return Err(Error::pole(format!("[x_{} - y_{}]", i + 1, j + 1)));
            }
            den.push(d);
        }
    }
    let m =
        SquareMatrix::try_from_fn(n, |i, j| Ok(ctx.bracket(x[i] - y[j] + t)? / den[i * n + j]))?;
    let lhs = m.determinant();

    let rhs = frobenius_closed_additive(x, y, t, ctx)?;
    Ok(FrobeniusSides {
        lhs,
        rhs,
        hadamard: m.hadamard_bound(),
    })
}

/// The product side of the additive Frobenius evaluation,
/// `(−1)^{C(n,2)} [t]^{n−1} [|x|−|y|+t] ∏_{i<j} [x_j−x_i][y_j−y_i] / ∏_{i,j} [x_i−y_j]`.
pub fn frobenius_closed_additive(x: &[C64], y: &[C64], t: C64, ctx: &ThetaContext) -> Result<C64> {
    let n = check_square(x, y)?;
    let sx: C64 = x.iter().sum();
    let sy: C64 = y.iter().sum();
    let mut rhs = c(sign(binom2(n) as i64), 0.0)
        * powi(ctx.bracket(t)?, n as i64 - 1)
        * ctx.bracket(sx - sy + t)?;
    for i in 0..n {
        for j in i + 1..n {
            rhs *= ctx.bracket(x[j] - x[i])? * ctx.bracket(y[j] - y[i])?;
        }
    }
    let mut den_prod = ONE;
    for (i, &xi) in x.iter().enumerate() {
        for (j, &yj) in y.iter().enumerate() {
            let d = ctx.bracket(xi - yj)?;
            if d.norm() <= POLE_EPS {
                return Err(Error::pole(format!("[x_{} - y_{}]", i + 1, j + 1)));
            }
            den_prod *= d;
        }
    }
    Ok(rhs / den_prod)
}

/// Multiplicative form of [`frobenius_det`].
pub fn frobenius_det_multiplicative(
    x: &[C64],
    y: &[C64],
    t: C64,
    ctx: &ThetaContext,
) -> Result<FrobeniusSides> {
    let n = check_square(x, y)?;
    let nome = ctx.nome();
    let mut den = Vec::with_capacity(n * n);
    for (i, &xi) in x.iter().enumerate() {
        for (j, &yj) in y.iter().enumerate() {
            if yj == ZERO {
                return Err(Error::domain(format!("y_{} = 0", j + 1)));
            }
            let d = nome.theta(xi / yj)?;
            if d.norm() <= POLE_EPS {
                return Err(Error::pole(format!("θ(x_{}/y_{})", i + 1, j + 1)));
            }
            den.push(d);
        }
    }
    let m = SquareMatrix::try_from_fn(n, |i, j| Ok(nome.theta(t * x[i] / y[j])? / den[i * n + j]))?;
    let lhs = m.determinant();

    let big_x: C64 = x.iter().product();
    let big_y: C64 = y.iter().product();
    let mut rhs = c(sign(binom2(n) as i64), 0.0)
        * powi(nome.theta(t)?, n as i64 - 1)
        * big_y
        * nome.theta(t * big_x / big_y)?;
    for i in 0..n {
        for j in i + 1..n {
            rhs *= x[j] * y[j] * nome.theta(x[i] / x[j])? * nome.theta(y[i] / y[j])?;
        }
    }
    let mut den_prod = ONE;
    for i in 0..n {
        for j in 0..n {
            den_prod *= y[j] * den[i * n + j];
        }
    }
    Ok(FrobeniusSides {
        lhs,
        rhs: rhs / den_prod,
        hadamard: m.hadamard_bound(),
    })
}

/// Checks that `f` is a theta function of order `order` and norm `norm`, by
/// testing both quasi-periods at each sample point:
///
/// `f(x+1/η) = (−1)^n f(x)` and `f(x+τ/η) = (−1)^n e^{2πiη(t−nx)−πiτn} f(x)`.
///
/// In the trigonometric case there is no second period and only the first
/// relation is tested. A sample where `f` fails to evaluate counts as a
/// failure.
pub fn order_norm_check<F>(
    f: F,
    order: i64,
    norm: C64,
    ctx: &ThetaContext,
    points: &[C64],
    tolerance: f64,
) -> bool
where
    F: Fn(C64) -> Result<C64>,
{
    points
        .iter()
        .all(|&x| quasi_periods_hold(&f, order, norm, ctx, x, tolerance).unwrap_or(false))
}

fn quasi_periods_hold<F>(
    f: &F,
    order: i64,
    norm: C64,
    ctx: &ThetaContext,
    x: C64,
    tolerance: f64,
) -> Result<bool>
where
    F: Fn(C64) -> Result<C64>,
{
    let eta = ctx.eta();
    let s = sign(order);
    let n = c(order as f64, 0.0);
    let fx = f(x)?;
    if rel_diff(f(x + ONE / eta)?, s * fx) > tolerance {
        return Ok(false);
    }
    if let Some(tau) = ctx.tau() {
        let factor = s * e2pi(eta * (norm - n * x)) * epi(-tau * n);
        if rel_diff(f(x + tau / eta)?, factor * fx) > tolerance {
            return Ok(false);
        }
    }
    Ok(true)
}

/// [`order_norm_check`] at `samples` random points `x = (u + vτ)/η`,
/// `u, v ∈ [0, 1)`. A point where `f` reports [`Error::Unresolved`] is
/// redrawn; if every redraw is unresolved the error is passed on, since the
/// cancellation then comes from the data fixed by the caller.
pub fn order_norm_check_sampled<F, R>(
    f: F,
    order: i64,
    norm: C64,
    ctx: &ThetaContext,
    samples: usize,
    tolerance: f64,
    rng: &mut R,
) -> Result<bool>
where
    F: Fn(C64) -> Result<C64>,
    R: Rng + ?Sized,
{
    const REDRAWS: usize = 100;
    let tau = ctx.tau().unwrap_or(c(0.0, 0.25));
    for _ in 0..samples {
        let mut unresolved = None;
        let mut holds = None;
        for _ in 0..REDRAWS {
            let u: f64 = rng.gen_range(0.0..1.0);
            let v: f64 = rng.gen_range(0.0..1.0);
            let x = (c(u, 0.0) + tau * v) / ctx.eta();
            match quasi_periods_hold(&f, order, norm, ctx, x, tolerance) {
                Ok(h) => {
                    holds = Some(h);
                    break;
                }
                Err(e @ Error::Unresolved { .. }) => unresolved = Some(e),
                Err(_) => {
                    holds = Some(false);
                    break;
                }
            }
        }
        match (holds, unresolved) {
            (Some(true), _) => {}
            (Some(false), _) => return Ok(false),
            (None, Some(e)) => return Err(e),
            (None, None) => return Ok(false),
        }
    }
    Ok(true)
}

/// `θ(ax)/θ(x)` minus its decomposition over the nome `p^N`:
///
/// `(p^N;p^N)²θ(a) / ((p;p)²θ(x^N;p^N)) · Σ_{k<N} x^k θ(a x^N p^k;p^N)/θ(a p^k;p^N)`.
pub fn theta_decompose_residual(
    a: C64,
    x: C64,
    big_n: u32,
    ctx: &ThetaContext,
) -> Result<Residual> {
    if big_n == 0 {
        return Err(Error::domain("N must be a positive integer"));
    }
    let nome = ctx.nome();
    let nome_n = nome.pow(big_n);
    let p = nome.p();

    let lhs = checked_div(nome.theta(a * x)?, nome.theta(x)?, "θ(x;p)")?;
    let xn = x.powu(big_n);
    let en = nome_n.euler();
    let e1 = nome.euler();
    let pre = checked_div(
        en * en * nome.theta(a)?,
        e1 * e1 * nome_n.theta(xn)?,
        "θ(x^N;p^N)",
    )?;

    let mut scale = lhs.norm();
    let mut rhs = ZERO;
    let mut pk = ONE;
    let mut xk = ONE;
    for k in 0..big_n {
        let term = pre
            * xk
            * checked_div(
                nome_n.theta(a * xn * pk)?,
                nome_n.theta(a * pk)?,
                &format!("θ(a p^{k}; p^N)"),
            )?;
        scale = scale.max(term.norm());
        rhs += term;
        pk *= p;
        xk *= x;
    }
    Ok(Residual::new(lhs - rhs, scale))
}

/// `Σ_{k=−K}^{K} x^k / (1 − a p^k)` for `|p| < |x| < 1`.
pub fn ramanujan_partial(a: C64, x: C64, ctx: &ThetaContext, terms: usize) -> Result<C64> {
    let p = ctx.p();
    let r = x.norm();
    if !(p.norm() < r && r < 1.0) {
        return Err(Error::domain(format!(
            "|x| = {r} must lie strictly between |p| and 1"
        )));
    }
    if a == ZERO {
        let mut sum = ONE;
        for k in 1..=terms as i64 {
            sum += powi(x, k) + powi(x, -k);
        }
        return Ok(sum);
    }
    let mut sum = ZERO;
    let mut pk = ONE;
    let mut xk = ONE;
    let mut ratio_k = ONE; // (p/x)^k
    for k in 0..=terms {
        if k > 0 {
            pk *= p;
            xk *= x;
            ratio_k *= p / x;
        }
        sum += checked_div(xk, ONE - a * pk, &format!("1 - a p^{k}"))?;
        if k > 0 {
            // x^{-k} / (1 - a p^{-k}) = (p/x)^k / (p^k - a)
            sum += checked_div(ratio_k, pk - a, &format!("1 - a p^-{k}"))?;
        }
    }
    Ok(sum)
}

/// `(p;p)²_∞ θ(ax) / (θ(a) θ(x))`, the limit of [`ramanujan_partial`].
pub fn ramanujan_closed_form(a: C64, x: C64, ctx: &ThetaContext) -> Result<C64> {
    let nome = ctx.nome();
    let e = nome.euler();
    checked_div(
        e * e * nome.theta(a * x)?,
        nome.theta(a)? * nome.theta(x)?,
        "θ(a)θ(x)",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rc(rng: &mut ChaCha8Rng, r: f64) -> C64 {
        c(rng.gen_range(-r..r), rng.gen_range(-r..r))
    }

    fn ctx() -> ThetaContext {
        ThetaContext::new(c(0.0, 0.3), c(0.17, 0.0)).unwrap()
    }

    #[test]
    fn addition_formula_structural_zeros() {
        let ctx = ctx();
        let (x, y, u) = (c(0.3, 0.1), c(-0.7, 0.4), c(0.2, -0.5));
        let r = addition_residual(x, y, u, u, &ctx).unwrap();
        assert_eq!(r.diff, ZERO);
        let r = addition_residual(x, x, u, c(1.1, 0.2), &ctx).unwrap();
        assert!(r.relative() < 1e-15);
    }

    #[test]
    fn addition_formula_random() {
        let ctx = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let r = addition_residual(
                rc(&mut rng, 2.0),
                rc(&mut rng, 2.0),
                rc(&mut rng, 2.0),
                rc(&mut rng, 2.0),
                &ctx,
            )
            .unwrap();
            assert!(r.relative() < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn frobenius_n1_is_symbolic_identity() {
        let ctx = ctx();
        let s = frobenius_det(
            &[c(0.4, 0.1)],
            &[c(-0.3, 0.2)],
            c(0.8, -0.1),
            &ctx,
            Convention::Additive,
        )
        .unwrap();
        assert!(s.relative_error() < 1e-15);
    }

    #[test]
    fn frobenius_random_both_conventions() {
        let ctx = ThetaContext::new(c(0.2, 0.0), c(0.21, 0.03)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 1..=6 {
            for _ in 0..10 {
                let x: Vec<C64> = (0..n).map(|_| rc(&mut rng, 1.5)).collect();
                let y: Vec<C64> = (0..n).map(|_| rc(&mut rng, 1.5)).collect();
                let t = rc(&mut rng, 1.5);
                let s = frobenius_det(&x, &y, t, &ctx, Convention::Additive).unwrap();
                assert!(s.relative_error() < 1e-9, "additive n={n}: {s:?}");
                let xm: Vec<C64> = x.iter().map(|&v| ctx.q_pow(v)).collect();
                let ym: Vec<C64> = y.iter().map(|&v| ctx.q_pow(v)).collect();
                let s = frobenius_det(&xm, &ym, ctx.q_pow(t), &ctx, Convention::Multiplicative)
                    .unwrap();
                assert!(s.relative_error() < 1e-9, "multiplicative n={n}: {s:?}");
            }
        }
    }

    #[test]
    fn frobenius_t_zero_and_pole() {
        let ctx = ctx();
        let x = [c(0.1, 0.0), c(0.5, 0.2)];
        let y = [c(-0.4, 0.1), c(0.9, -0.3)];
        let s = frobenius_det(&x, &y, ZERO, &ctx, Convention::Additive).unwrap();
        assert!(s.lhs.norm() < 1e-14 && s.rhs.norm() < 1e-14);
        let bad = frobenius_det(&x, &[x[1], y[1]], ONE, &ctx, Convention::Additive);
        match bad {
            Err(Error::Pole { factor }) => assert_eq!(factor, "[x_2 - y_1]"),
            other => panic!("expected pole, got {other:?}"),
        }
    }

    #[test]
    fn order_norm_of_brackets() {
        let ctx = ThetaContext::new(c(0.1, 0.2), c(0.19, 0.01)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = |x: C64| ctx.bracket(x);
        assert!(order_norm_check_sampled(f, 1, ZERO, &ctx, 20, 1e-9, &mut rng).unwrap());
        assert!(!order_norm_check_sampled(f, 2, ZERO, &ctx, 20, 1e-9, &mut rng).unwrap());
        let (a, b) = (c(0.3, 0.1), c(-0.8, 0.5));
        let g = |x: C64| Ok(ctx.bracket(x - a)? * ctx.bracket(x - b)?);
        assert!(order_norm_check_sampled(g, 2, a + b, &ctx, 20, 1e-9, &mut rng).unwrap());
        assert!(!order_norm_check_sampled(g, 2, a, &ctx, 20, 1e-9, &mut rng).unwrap());
    }

    #[test]
    fn decomposition_lemma() {
        let ctx = ThetaContext::new(c(0.15, 0.0), c(0.2, 0.0)).unwrap();
        let r = theta_decompose_residual(c(0.7, 0.3), c(0.5, -0.4), 1, &ctx).unwrap();
        assert!(r.relative() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for big_n in 2..=5 {
            for _ in 0..20 {
                let a = c(rng.gen_range(0.3..1.5), 0.0) * e2pi(c(rng.gen_range(0.0..1.0), 0.0));
                let x = c(rng.gen_range(0.3..1.5), 0.0) * e2pi(c(rng.gen_range(0.0..1.0), 0.0));
                let r = theta_decompose_residual(a, x, big_n, &ctx).unwrap();
                assert!(r.relative() < 1e-10, "N={big_n}: {r:?}");
            }
        }
        assert!(matches!(
            theta_decompose_residual(ONE, c(0.5, 0.1), 3, &ctx),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn decomposition_lemma_trigonometric() {
        let ctx = ThetaContext::trigonometric(c(0.2, 0.0)).unwrap();
        let r = theta_decompose_residual(c(0.7, 0.3), c(0.5, -0.4), 3, &ctx).unwrap();
        assert!(r.relative() < 1e-14, "{r:?}");
    }

    #[test]
    fn ramanujan_sum() {
        let ctx = ThetaContext::new(c(0.1, 0.0), c(0.2, 0.0)).unwrap();
        let x = c(0.5, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..10 {
            let a = rc(&mut rng, 2.0);
            let partial = ramanujan_partial(a, x, &ctx, 60).unwrap();
            let closed = ramanujan_closed_form(a, x, &ctx).unwrap();
            assert!(rel_diff(partial, closed) < 1e-10);
        }
        let geometric = ramanujan_partial(ZERO, x, &ctx, 3).unwrap();
        let expect: C64 = (-3..=3).map(|k| powi(x, k)).sum();
        assert!(rel_diff(geometric, expect) < 1e-15);
        assert!(matches!(
            ramanujan_partial(ONE, c(0.1, 0.0), &ctx, 5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            ramanujan_partial(ONE, c(1.0, 0.0), &ctx, 5),
            Err(Error::Domain(_))
        ));
    }
}
