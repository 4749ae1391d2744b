use alloc::format;
use alloc::vec::Vec;

use super::params::MultiplicativeParams;
use super::weights::TrackedSum;
use crate::error::{Error, Result};
use crate::scalar::{binom2, c, checked_div, checked_div_by, nonzero, powi, sign, C64, ONE};
use crate::theta::linalg::SquareMatrix;
use crate::theta::ThetaContext;

/// `∏_{i,j} y_j² θ(x_i/y_j) θ(q x_i/y_j) / ∏_{i<j} x_j y_j θ(x_i/x_j) θ(y_i/y_j)`.
fn cauchy_prefactor(params: &MultiplicativeParams, ctx: &ThetaContext) -> Result<C64> {
    let (x, y, q, n) = (&params.x, &params.y, ctx.q(), params.n());
    let mut num = ONE;
    for i in 0..n {
        for j in 0..n {
            let r = x[i] / y[j];
            num *= y[j] * y[j] * ctx.theta(r)? * ctx.theta(q * r)?;
        }
    }
    let mut den = Vec::with_capacity(n * n * 2);
    for i in 0..n {
        for j in (i + 1)..n {
            den.extend([
                x[j] * y[j],
                ctx.theta(x[i] / x[j])?,
                ctx.theta(y[i] / y[j])?,
            ]);
        }
    }
    checked_div_by(num, &den, "θ(x_i/x_j) θ(y_i/y_j)")
}

/// The matrices `θ(γx_i/y_j)/θ(x_i/y_j)` and `θ(qγx_i/y_j)/θ(qx_i/y_j)` whose
/// combinations `A − q^{−k} B` appear in every reduced sum.
struct ShiftedPair {
    n: usize,
    plain: Vec<C64>,
    raised: Vec<C64>,
}

impl ShiftedPair {
    fn new(params: &MultiplicativeParams, gamma: C64, ctx: &ThetaContext) -> Result<Self> {
        let (x, y, q, n) = (&params.x, &params.y, ctx.q(), params.n());
        let mut plain = Vec::with_capacity(n * n);
        let mut raised = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let r = x[i] / y[j];
                plain.push(checked_div(
                    ctx.theta(gamma * r)?,
                    ctx.theta(r)?,
                    &format!("θ(x_{}/y_{})", i + 1, j + 1),
                )?);
                raised.push(checked_div(
                    ctx.theta(q * gamma * r)?,
                    ctx.theta(q * r)?,
                    &format!("θ(q x_{}/y_{})", i + 1, j + 1),
                )?);
            }
        }
        Ok(ShiftedPair { n, plain, raised })
    }

    fn matrix(&self, k: i64, ctx: &ThetaContext) -> SquareMatrix {
        let w = ctx.q_pow(c(-k as f64, 0.0));
        SquareMatrix::from_fn(self.n, |i, j| {
            self.plain[i * self.n + j] - w * self.raised[i * self.n + j]
        })
    }

    fn det(&self, k: i64, ctx: &ThetaContext) -> C64 {
        self.matrix(k, ctx).determinant()
    }
}

/// `(−1)^{C(n,2)} θ(λq^n) / (θ(q)^{n²} θ(γ)^{n−1} Y θ(Xλγq^n/Y))` times the
/// Cauchy-type prefactor; shared by the root-of-unity and Laurent sums.
fn common_prefactor(params: &MultiplicativeParams, gamma: C64, ctx: &ThetaContext) -> Result<C64> {
    let n = params.n();
    let qn = ctx.q_pow(c(n as f64, 0.0));
    let (big_x, big_y) = (params.x_prod(), params.y_prod());
    let num = c(sign(binom2(n) as i64), 0.0) * ctx.theta(params.lambda * qn)?;
    let th_q = nonzero(ctx.theta(ctx.q())?, "θ(q)")?;
    let th_g = ctx.theta(gamma)?;
    let shift = ctx.theta(big_x * params.lambda * gamma * qn / big_y)?;
    let v = checked_div_by(num, &[th_g, big_y, shift], "θ(γ) θ(Xλγq^n/Y) (resample γ)")?;
    Ok(v / powi(th_q, (n * n) as i64) / powi(th_g, n as i64 - 2) * cauchy_prefactor(params, ctx)?)
}

/// How the auxiliary parameter of the root-of-unity sum is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootGamma {
    /// A generic value of `γ`; all `N` terms are kept.
    Value(C64),
    /// `γ = p^{−k₀} λ^{−N}`, which kills the term `k ≡ k₀ (mod N)` so only
    /// `N − 1` determinants are evaluated.
    Vanishing(i64),
}

fn check_root_of_unity(big_n: usize, ctx: &ThetaContext) -> Result<()> {
    if big_n == 0 {
        return Err(Error::domain("N must be positive"));
    }
    let qn = ctx.q_pow(c(big_n as f64, 0.0));
    if (qn - ONE).norm() > 1e-10 {
        return Err(Error::domain(format!("q^{big_n} = {qn} is not 1")));
    }
    Ok(())
}

/// `Z̃_n` as a sum of `N` determinants when `q^N = 1`.
pub fn z_root_of_unity(
    params: &MultiplicativeParams,
    big_n: usize,
    gamma: RootGamma,
    ctx: &ThetaContext,
) -> Result<C64> {
    Ok(z_root_of_unity_tracked(params, big_n, gamma, ctx)?.value)
}

/// [`z_root_of_unity`] with `Σ_k |coefficient| · (Hadamard bound of the k-th
/// determinant)`, scaled like the value, as the magnitude.
pub fn z_root_of_unity_tracked(
    params: &MultiplicativeParams,
    big_n: usize,
    gamma: RootGamma,
    ctx: &ThetaContext,
) -> Result<TrackedSum> {
    check_root_of_unity(big_n, ctx)?;
    let n = params.n();
    if n == 0 {
        return Ok(TrackedSum::exact(ONE));
    }
    let lambda = params.lambda;
    let lam_n = lambda.powu(big_n as u32);
    let p = ctx.p();
    let (gamma, skip) = match gamma {
        RootGamma::Value(g) => (g, None),
        RootGamma::Vanishing(k0) => {
            if k0 > 0 && p.norm() == 0.0 {
                return Err(Error::domain("γ = p^{−k₀} λ^{−N} needs p ≠ 0 for k₀ > 0"));
            }
            (
                checked_div(ONE, powi(p, k0) * lam_n, "p^{k₀} λ^N")?,
                Some(k0),
            )
        }
    };
    let nome_n = ctx.nome().pow(big_n as u32);
    let pair = ShiftedPair::new(params, gamma, ctx)?;
    let qn = ctx.q_pow(c(n as f64, 0.0));
    let mut sum = c(0.0, 0.0);
    let mut magnitude = 0.0;
    let mut pk = ONE;
    for k in 0..big_n as i64 {
        let keep = skip.is_none_or(|k0| (k - k0).rem_euclid(big_n as i64) != 0);
        if keep {
            let coef = checked_div(
                powi(lambda * qn, k) * nome_n.theta(gamma * lam_n * pk)?,
                nome_n.theta(gamma * pk)?,
                &format!("θ(γp^{k}; p^N)"),
            )?;
            let m = pair.matrix(k, ctx);
            sum += coef * m.determinant();
            magnitude += coef.norm() * m.hadamard_bound();
        }
        pk *= p;
    }
    let euler = ctx.nome().euler();
    let euler_n = nome_n.euler();
    let ratio = checked_div_by(
        euler_n * euler_n,
        &[euler * euler, nome_n.theta(lam_n)?],
        "θ(λ^N; p^N)",
    )?;
    Ok(TrackedSum::scaled(
        ratio * common_prefactor(params, gamma, ctx)?,
        sum,
        magnitude,
    ))
}

/// `Z̃_n` as the doubly infinite determinant sum, truncated to `|k| ≤ K`.
/// Requires `|p| < |λq^k| < 1` for `0 ≤ k ≤ n`.
pub fn z_laurent(
    params: &MultiplicativeParams,
    gamma: C64,
    ctx: &ThetaContext,
    big_k: usize,
) -> Result<C64> {
    let n = params.n();
    if n == 0 {
        return Ok(ONE);
    }
    let p = ctx.p();
    for k in 0..=n {
        let r = (params.lambda * ctx.q_pow(c(k as f64, 0.0))).norm();
        if !(p.norm() < r && r < 1.0) {
            return Err(Error::domain(format!(
                "|λq^{k}| = {r} lies outside the annulus |p| < |λq^k| < 1"
            )));
        }
    }
    let pair = ShiftedPair::new(params, gamma, ctx)?;
    let z = params.lambda * ctx.q_pow(c(n as f64, 0.0));
    let mut sum = c(0.0, 0.0);
    let mut pk = ONE;
    for k in 0..=big_k as i64 {
        // k ≥ 0: z^k / (1 − γp^k)
        sum +=
            checked_div(powi(z, k), ONE - gamma * pk, &format!("1 − γp^{k}"))? * pair.det(k, ctx);
        if k > 0 {
            // −k: z^{−k} p^k / (p^k − γ)
            sum += checked_div(powi(z, -k) * pk, pk - gamma, &format!("1 − γp^{{−{k}}}"))?
                * pair.det(-k, ctx);
        }
        pk *= p;
    }
    let euler = ctx.nome().euler();
    Ok(common_prefactor(params, gamma, ctx)? / (euler * euler) * sum)
}

/// The free-fermion product formula for `Z̃_n`, valid at `q = −1`.
pub fn z_free_fermion(params: &MultiplicativeParams, ctx: &ThetaContext) -> Result<C64> {
    let q = ctx.q();
    if (q + ONE).norm() > 1e-10 {
        return Err(Error::domain(format!(
            "the product formula needs q = −1, got {q}"
        )));
    }
    let n = params.n();
    if n == 0 {
        return Ok(ONE);
    }
    let (x, y) = (&params.x, &params.y);
    let s = sign(n as i64 + 1);
    let (big_x, big_y) = (params.x_prod(), params.y_prod());
    let e1 = ctx.nome().euler();
    let e2 = ctx.nome().pow(2).euler();
    let pairs = (n * (n - 1)) as i64;
    let mut v = powi(c(0.5, 0.0) * (e1 / e2) * (e1 / e2), pairs)
        * big_x
        * checked_div(
            ctx.theta(s * params.lambda * big_y / big_x)?,
            ctx.theta(s * params.lambda)?,
            "θ((−1)^{n+1} λ)",
        )?;
    for i in 0..n {
        for j in (i + 1)..n {
            v *= x[i] * y[i] * ctx.theta(-x[j] / x[i])? * ctx.theta(-y[j] / y[i])?;
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::brute::z_tilde;
    use crate::partition::params::ParamSampler;
    use crate::scalar::rel_diff;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample(n: usize, ctx: &ThetaContext, seed: u64) -> MultiplicativeParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ParamSampler::default()
            .sample(n, ctx, &mut rng)
            .unwrap()
            .to_multiplicative(ctx)
    }

    #[test]
    fn root_of_unity_matches_state_sum() {
        for big_n in 2..=4usize {
            let ctx = ThetaContext::new(c(0.15, 0.1), c(1.0 / big_n as f64, 0.0)).unwrap();
            for n in 1..=3 {
                let m = sample(n, &ctx, 30 + (big_n * 10 + n) as u64);
                let want = z_tilde(&m, &ctx).unwrap();
                let g = m.gamma.unwrap();
                let full = z_root_of_unity(&m, big_n, RootGamma::Value(g), &ctx).unwrap();
                assert!(
                    rel_diff(full, want) < 1e-9,
                    "N={big_n} n={n}: {full} vs {want}"
                );
                for k0 in [-1, 0, 2] {
                    let short = z_root_of_unity(&m, big_n, RootGamma::Vanishing(k0), &ctx).unwrap();
                    assert!(rel_diff(short, want) < 1e-8, "N={big_n} n={n} k0={k0}");
                }
            }
        }
    }

    #[test]
    fn root_of_unity_rejects_generic_q() {
        let ctx = ThetaContext::new(c(0.1, 0.0), c(0.3, 0.01)).unwrap();
        let m = sample(2, &ctx, 40);
        assert!(matches!(
            z_root_of_unity(&m, 3, RootGamma::Value(c(0.5, 0.5)), &ctx),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn free_fermion_matches() {
        let ctx = ThetaContext::new(c(0.2, -0.1), c(0.5, 0.0)).unwrap();
        for n in 1..=4 {
            let m = sample(n, &ctx, 50 + n as u64);
            let want = z_tilde(&m, &ctx).unwrap();
            let ff = z_free_fermion(&m, &ctx).unwrap();
            assert!(rel_diff(ff, want) < 1e-9, "n={n}: {ff} vs {want}");
            let two = z_root_of_unity(&m, 2, RootGamma::Vanishing(-1), &ctx).unwrap();
            assert!(rel_diff(two, ff) < 1e-9);
        }
        let mut m = sample(3, &ctx, 60);
        m.x[2] = -m.x[0];
        assert!(z_free_fermion(&m, &ctx).unwrap().norm() < 1e-14);
        let n1 =
            MultiplicativeParams::new(vec![c(0.3, 0.8)], vec![c(1.2, -0.1)], c(0.4, 0.2)).unwrap();
        let want = n1.x[0] * ctx.theta(n1.lambda * n1.y[0] / n1.x[0]).unwrap()
            / ctx.theta(n1.lambda).unwrap();
        assert!(rel_diff(z_free_fermion(&n1, &ctx).unwrap(), want) < 1e-13);
    }

    #[test]
    fn laurent_converges() {
        let ctx = ThetaContext::new(c(0.05, 0.0), c(0.11, 0.03)).unwrap();
        let mut m = sample(2, &ctx, 70);
        // place |λq^k| near sqrt(|p|) for k = 0..=n
        let mid = ctx.q_pow(c(1.0, 0.0)).norm().recip();
        m.lambda = c(0.05f64.sqrt() * mid, 0.0) * c(0.6, 0.8);
        let want = z_tilde(&m, &ctx).unwrap();
        let g = m.gamma.unwrap();
        let z40 = z_laurent(&m, g, &ctx, 40).unwrap();
        assert!(rel_diff(z40, want) < 1e-8, "{z40} vs {want}");
        let errs: Vec<f64> = [0, 2, 5, 10, 20]
            .iter()
            .map(|&k| rel_diff(z_laurent(&m, g, &ctx, k).unwrap(), want))
            .collect();
        assert!(errs[0] > 1e-4);
        for w in errs.windows(2) {
            assert!(w[1] < w[0], "{errs:?}");
        }
        m.lambda = c(2.0, 0.0);
        assert!(matches!(z_laurent(&m, g, &ctx, 5), Err(Error::Domain(_))));
    }
}
