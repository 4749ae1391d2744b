use alloc::format;
use alloc::vec::Vec;

use super::params::{AdditiveParams, MultiplicativeParams};
use super::weights::TrackedSum;
use crate::error::Result;
use crate::scalar::{checked_div, checked_div_by, nonzero, powi, C64, ONE, ZERO};
use crate::theta::ThetaContext;

/// Heap's algorithm over `0..n`, calling `f` on every permutation.
pub(crate) fn for_each_permutation(
    n: usize,
    mut f: impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut counters = alloc::vec![0usize; n];
    f(&perm)?;
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            f(&perm)?;
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    Ok(())
}

/// `Z_n` as the `n!`-term elliptic weight function.
pub fn z_weightfunction(params: &AdditiveParams, ctx: &ThetaContext) -> Result<C64> {
    Ok(z_weightfunction_tracked(params, ctx)?.value)
}

/// [`z_weightfunction`] with the magnitude of the `n!` addends.
pub fn z_weightfunction_tracked(params: &AdditiveParams, ctx: &ThetaContext) -> Result<TrackedSum> {
    let n = params.n();
    if n == 0 {
        return Ok(TrackedSum::exact(ONE));
    }
    let (x, y, lambda) = (&params.x, &params.y, params.lambda);
    let br = |z: C64| ctx.bracket(z);
    // [y_j − x_i], [y_j − x_i − 1], [y_j − x_i + λ + n − 1 − i] tables.
    let mut yx = Vec::with_capacity(n * n);
    let mut yx1 = Vec::with_capacity(n * n);
    let mut yxl = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let d = y[j] - x[i];
            yx.push(br(d)?);
            yx1.push(br(d - 1.0)?);
            yxl.push(br(d + lambda + (n - 1 - i) as f64)?);
        }
    }
    let mut yy = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let d = y[a] - y[b];
            yy.push((br(d + 1.0)?, br(d)?));
        }
    }
    let mut sum = ZERO;
    let mut magnitude = 0.0;
    for_each_permutation(n, |s| {
        let mut term = ONE;
        for i in 0..n {
            for j in (i + 1)..n {
                let (num, den) = yy[s[j] * n + s[i]];
                term *= checked_div_by(
                    num * yx1[s[j] * n + i],
                    &[den, yx[s[j] * n + i]],
                    &format!(
                        "[y_{} − y_{}][y_{} − x_{}]",
                        s[j] + 1,
                        s[i] + 1,
                        s[j] + 1,
                        i + 1
                    ),
                )?;
            }
            term *= checked_div(
                yxl[s[i] * n + i],
                yx[s[i] * n + i],
                &format!("[y_{} − x_{}]", s[i] + 1, i + 1),
            )?;
        }
        sum += term;
        magnitude += term.norm();
        Ok(())
    })?;
    let mut pre = yx.iter().product::<C64>();
    let one = nonzero(br(ONE)?, "[1]")?;
    let den = (0..n)
        .map(|j| br(lambda + j as f64))
        .collect::<Result<Vec<_>>>()?;
    pre = checked_div_by(pre, &den, "∏ [λ + j − 1]")? / powi(one, (n * (n - 1)) as i64);
    Ok(TrackedSum::scaled(pre, sum, magnitude))
}

/// `Z̃_n` as the multiplicative weight function.
pub fn z_tilde_weightfunction(params: &MultiplicativeParams, ctx: &ThetaContext) -> Result<C64> {
    let n = params.n();
    if n == 0 {
        return Ok(ONE);
    }
    let (x, y, lambda) = (&params.x, &params.y, params.lambda);
    let q = ctx.q();
    let th = |z: C64| ctx.theta(z);
    let qp = |k: usize| ctx.q_pow(C64::new(k as f64, 0.0));
    let mut sum = ZERO;
    for_each_permutation(n, |s| {
        let mut term = ONE;
        for i in 0..n {
            for j in (i + 1)..n {
                let (ys, yr) = (y[s[j]], y[s[i]]);
                let num = th(q * ys / yr)? * th(ys / (x[i] * q))?;
                let den = [th(ys / yr)?, th(ys / x[i])?];
                term *= checked_div_by(
                    num,
                    &den,
                    &format!(
                        "θ(y_{}/y_{}) θ(y_{}/x_{})",
                        s[j] + 1,
                        s[i] + 1,
                        s[j] + 1,
                        i + 1
                    ),
                )?;
            }
            let ys = y[s[i]];
            term *= checked_div(
                th(lambda * qp(n - 1 - i) * ys / x[i])?,
                th(ys / x[i])?,
                &format!("θ(y_{}/x_{})", s[i] + 1, i + 1),
            )?;
        }
        sum += term;
        Ok(())
    })?;
    let mut num = qp(n * (n - 1) / 2);
    for i in 0..n {
        for j in 0..n {
            num *= x[i] * th(y[j] / x[i])?;
        }
    }
    let th_q = nonzero(th(q)?, "θ(q)")?;
    let den = (0..n)
        .map(|j| th(lambda * qp(j)))
        .collect::<Result<Vec<_>>>()?;
    Ok(checked_div_by(num, &den, "∏ θ(λq^{j−1})")? / powi(th_q, (n * (n - 1)) as i64) * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::brute::{z_bruteforce, z_tilde};
    use crate::partition::params::ParamSampler;
    use crate::scalar::{c, rel_diff};
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn heap_visits_all_permutations() {
        let mut seen = Vec::new();
        for_each_permutation(4, |p| {
            seen.push(p.to_vec());
            Ok(())
        })
        .unwrap();
        assert_eq!(seen.len(), 24);
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 24);
        let mut one = 0;
        for_each_permutation(1, |_| {
            one += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(one, 1);
    }

    #[test]
    fn matches_brute_force() {
        let ctx = ThetaContext::new(c(0.0, 0.2), c(0.13, 0.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=4 {
            for _ in 0..3 {
                let p = ParamSampler::default().sample(n, &ctx, &mut rng).unwrap();
                let a = z_bruteforce(&p, &ctx).unwrap();
                let b = z_weightfunction(&p, &ctx).unwrap();
                assert!(rel_diff(a, b) < 1e-9, "n={n}: {a} vs {b}");
                let m = p.to_multiplicative(&ctx);
                let ta = z_tilde(&m, &ctx).unwrap();
                let tb = z_tilde_weightfunction(&m, &ctx).unwrap();
                assert!(rel_diff(ta, tb) < 1e-9, "n={n}: {ta} vs {tb}");
            }
        }
    }

    #[test]
    fn n1_closed_form() {
        let ctx = ThetaContext::new(c(0.1, 0.0), c(0.21, 0.0)).unwrap();
        let p = AdditiveParams::new(vec![c(0.2, 0.1)], vec![c(-0.4, 0.0)], c(0.3, 0.2)).unwrap();
        let z = z_weightfunction(&p, &ctx).unwrap();
        let want =
            ctx.bracket(p.lambda + p.y[0] - p.x[0]).unwrap() / ctx.bracket(p.lambda).unwrap();
        assert!(rel_diff(z, want) < 1e-13);
    }
}
