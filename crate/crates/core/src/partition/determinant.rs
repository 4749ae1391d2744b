use alloc::format;
use alloc::vec::Vec;

use super::params::AdditiveParams;
use super::weights::TrackedSum;
use crate::error::{Error, Result};
use crate::scalar::{
    binom2, c, checked_div, checked_div_by, epi, nonzero, powi, sign, C64, ONE, ZERO,
};
use crate::theta::linalg::SquareMatrix;
use crate::theta::{frobenius_closed_additive, ThetaContext};

/// How each determinant of the `2^n`-term sum is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeterminantPath {
    /// Pivoted elimination on the matrix entries.
    #[default]
    Direct,
    /// Frobenius' closed product.
    Frobenius,
}

/// `(−1)^{C(n,2)} ∏_{i,j} [x_i−y_j][x_i+1−y_j] / ∏_{i<j} [x_i−x_j][y_i−y_j]`.
fn cauchy_prefactor(params: &AdditiveParams, ctx: &ThetaContext) -> Result<C64> {
    let n = params.n();
    let (x, y) = (&params.x, &params.y);
    let mut num = c(sign(binom2(n) as i64), 0.0);
    for i in 0..n {
        for j in 0..n {
            num *= ctx.bracket(x[i] - y[j])? * ctx.bracket(x[i] + 1.0 - y[j])?;
        }
    }
    let mut den = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in (i + 1)..n {
            den.extend([ctx.bracket(x[i] - x[j])?, ctx.bracket(y[i] - y[j])?]);
        }
    }
    checked_div_by(num, &den, "∏_{i<j} [x_i − x_j][y_i − y_j]")
}

fn shifted(x: &[C64], mask: u64) -> Vec<C64> {
    x.iter()
        .enumerate()
        .map(|(i, &v)| if mask >> i & 1 == 1 { v + 1.0 } else { v })
        .collect()
}

fn check_width(n: usize) -> Result<()> {
    if n >= 64 {
        return Err(Error::domain(format!("subset sums need n < 64, got {n}")));
    }
    Ok(())
}

/// `Z_n` as the `2^n`-term determinant sum, for the auxiliary `γ` carried by
/// `params`. The value does not depend on `γ` as long as it is generic.
pub fn z_ik_sum(params: &AdditiveParams, ctx: &ThetaContext, path: DeterminantPath) -> Result<C64> {
    Ok(z_ik_sum_tracked(params, ctx, path)?.value)
}

/// [`z_ik_sum`] with `Σ |coefficient| · |det|`, each determinant bounded by
/// its Hadamard bound on the direct path, as the magnitude.
pub fn z_ik_sum_tracked(
    params: &AdditiveParams,
    ctx: &ThetaContext,
    path: DeterminantPath,
) -> Result<TrackedSum> {
    let n = params.n();
    if n == 0 {
        return Ok(TrackedSum::exact(ONE));
    }
    check_width(n)?;
    let gamma = params.gamma()?;
    let (x, y, lambda) = (&params.x, &params.y, params.lambda);
    let nf = n as f64;
    let resample = " (resample γ)";

    let entries = |shift: f64| -> Result<Vec<C64>> {
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let d = x[i] + shift - y[j];
                out.push(checked_div(
                    ctx.bracket(d + gamma)?,
                    ctx.bracket(d)?,
                    &format!("[x_{} + {shift} − y_{}]", i + 1, j + 1),
                )?);
            }
        }
        Ok(out)
    };
    let (plain, raised) = match path {
        DeterminantPath::Direct => (entries(0.0)?, entries(1.0)?),
        DeterminantPath::Frobenius => (Vec::new(), Vec::new()),
    };

    let mut sum = ZERO;
    let mut magnitude = 0.0;
    for mask in 0u64..(1 << n) {
        let s = mask.count_ones() as usize;
        let coef = checked_div(
            ctx.bracket(lambda + gamma + (n - s) as f64)?,
            ctx.bracket(lambda + (n - s) as f64)?,
            &format!("[λ + {}]", n - s),
        )?;
        let (det, bound) = match path {
            DeterminantPath::Direct => {
                let m = SquareMatrix::from_fn(n, |i, j| {
                    if mask >> i & 1 == 1 {
                        raised[i * n + j]
                    } else {
                        plain[i * n + j]
                    }
                });
                (m.determinant(), m.hadamard_bound())
            }
            DeterminantPath::Frobenius => {
                let det = frobenius_closed_additive(&shifted(x, mask), y, gamma, ctx)?;
                (det, det.norm())
            }
        };
        sum += c(sign(s as i64), 0.0) * coef * det;
        magnitude += coef.norm() * bound;
    }

    let one = nonzero(ctx.bracket(ONE)?, "[1]")?;
    let shift = params.x_sum() - params.y_sum() + lambda + gamma + nf;
    let g = ctx.bracket(gamma)?;
    let pre = checked_div_by(
        ctx.bracket(lambda + nf)?,
        &[g, ctx.bracket(shift)?],
        &format!("[γ][|x| − |y| + λ + γ + n]{resample}"),
    )? / powi(one, (n * n) as i64)
        / powi(g, n as i64 - 1);
    Ok(TrackedSum::scaled(
        pre * cauchy_prefactor(params, ctx)?,
        sum,
        magnitude,
    ))
}

/// One addend of the factored `2^n`-term sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactoredTerm {
    /// Bit `i` set means `i + 1 ∈ S`.
    pub subset: u64,
    /// The addend, overall prefactor included.
    pub value: C64,
}

/// The `2^n` fully factored addends whose sum is `Z_n`, indexed by subsets
/// `S` in increasing bitmask order. Costs `O(2^n n^2)` after an `O(n^2)`
/// bracket table.
pub fn factored_terms(params: &AdditiveParams, ctx: &ThetaContext) -> Result<Vec<FactoredTerm>> {
    let n = params.n();
    check_width(n)?;
    let gamma = params.gamma()?;
    let (x, y, lambda) = (&params.x, &params.y, params.lambda);
    let nf = n as f64;
    let diff = params.x_sum() - params.y_sum();

    let mut row_plain = alloc::vec![ONE; n];
    let mut row_raised = alloc::vec![ONE; n];
    for i in 0..n {
        for j in 0..n {
            row_plain[i] *= ctx.bracket(x[i] - y[j])?;
            row_raised[i] *= ctx.bracket(x[i] + 1.0 - y[j])?;
        }
    }
    // cross[i][j] = [x_i + 1 − x_j] / [x_i − x_j], only read for i ∈ S, j ∉ S.
    let mut cross = alloc::vec![Ok(ZERO); n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                cross[i * n + j] = (|| {
                    checked_div(
                        ctx.bracket(x[i] + 1.0 - x[j])?,
                        ctx.bracket(x[i] - x[j])?,
                        &format!("[x_{} − x_{}]", i + 1, j + 1),
                    )
                })();
            }
        }
    }
    let mut by_size = Vec::with_capacity(n + 1);
    for s in 0..=n {
        let k = (n - s) as f64;
        by_size.push(checked_div(
            c(sign(s as i64), 0.0)
                * ctx.bracket(lambda + gamma + k)?
                * ctx.bracket(diff + gamma + s as f64)?,
            ctx.bracket(lambda + k)?,
            &format!("[λ + {}]", n - s),
        )?);
    }
    let one = nonzero(ctx.bracket(ONE)?, "[1]")?;
    let pre = checked_div_by(
        ctx.bracket(lambda + nf)?,
        &[
            ctx.bracket(gamma)?,
            ctx.bracket(diff + lambda + gamma + nf)?,
        ],
        "[γ][|x| − |y| + λ + γ + n] (resample γ)",
    )? / powi(one, (n * n) as i64);

    let mut terms = Vec::with_capacity(1 << n);
    for mask in 0u64..(1 << n) {
        let mut v = pre * by_size[mask.count_ones() as usize];
        for i in 0..n {
            let inside = mask >> i & 1 == 1;
            v *= if inside { row_plain[i] } else { row_raised[i] };
            if inside {
                for j in 0..n {
                    if mask >> j & 1 == 0 {
                        v *= cross[i * n + j].clone()?;
                    }
                }
            }
        }
        terms.push(FactoredTerm {
            subset: mask,
            value: v,
        });
    }
    Ok(terms)
}

/// `Z_n` as the sum of explicitly factored terms.
pub fn z_factored_sum(params: &AdditiveParams, ctx: &ThetaContext) -> Result<C64> {
    Ok(z_factored_sum_tracked(params, ctx)?.value)
}

pub fn z_factored_sum_tracked(params: &AdditiveParams, ctx: &ThetaContext) -> Result<TrackedSum> {
    if params.n() == 0 {
        return Ok(TrackedSum::exact(ONE));
    }
    Ok(TrackedSum::of(
        factored_terms(params, ctx)?.iter().map(|t| t.value),
    ))
}

/// The six-vertex limit `Z_n(x; y; ∞)` as a single Izergin–Korepin
/// determinant. Only defined for the trigonometric nome `p = 0`; the limit is
/// taken along `Im(ηλ) → +∞`.
pub fn z_sixvertex_ik(params: &AdditiveParams, ctx: &ThetaContext) -> Result<C64> {
    if !ctx.nome().is_trigonometric() {
        return Err(Error::domain("the six-vertex limit needs p = 0"));
    }
    let n = params.n();
    if n == 0 {
        return Ok(ONE);
    }
    let (x, y) = (&params.x, &params.y);
    let m = SquareMatrix::try_from_fn(n, |i, j| {
        let d = x[i] - y[j];
        checked_div(
            ONE,
            ctx.bracket(d)? * ctx.bracket(d + 1.0)?,
            &format!(
                "[x_{i1} − y_{j1}][x_{i1} + 1 − y_{j1}]",
                i1 = i + 1,
                j1 = j + 1
            ),
        )
    })?;
    let one = ctx.bracket(ONE)?;
    let phase = epi(ctx.eta() * (params.x_sum() - params.y_sum()));
    let pre = checked_div(phase, powi(one, (n * n - n) as i64), "[1]")?;
    Ok(pre * cauchy_prefactor(params, ctx)? * m.determinant())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::brute::z_bruteforce;
    use crate::partition::params::ParamSampler;
    use crate::partition::weight_function::z_weightfunction;
    use crate::scalar::rel_diff;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> ThetaContext {
        ThetaContext::new(c(0.0, 0.3), c(0.17, 0.0)).unwrap()
    }

    #[test]
    fn agrees_with_brute_force_for_two_gammas() {
        let ctx = ctx();
        let sampler = ParamSampler::default();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1..=4 {
            let p = sampler.sample(n, &ctx, &mut rng).unwrap();
            let p2 = sampler.resample_gamma(&p, &ctx, &mut rng).unwrap();
            let z = z_bruteforce(&p, &ctx).unwrap();
            for q in [&p, &p2] {
                let d = z_ik_sum(q, &ctx, DeterminantPath::Direct).unwrap();
                let f = z_ik_sum(q, &ctx, DeterminantPath::Frobenius).unwrap();
                let s = z_factored_sum(q, &ctx).unwrap();
                assert!(rel_diff(z, d) < 1e-9, "n={n} direct {z} {d}");
                assert!(rel_diff(d, f) < 1e-10, "n={n} paths");
                assert!(rel_diff(f, s) < 1e-10, "n={n} factored");
            }
        }
    }

    #[test]
    fn n1_reduces_to_addition_formula() {
        let ctx = ctx();
        let p = AdditiveParams::new(vec![c(0.3, 0.2)], vec![c(-0.1, 0.1)], c(0.45, -0.2))
            .unwrap()
            .with_gamma(c(0.6, 0.3));
        let b = |z: C64| ctx.bracket(z).unwrap();
        let (l, g, d) = (p.lambda, p.gamma.unwrap(), p.x[0] - p.y[0]);
        let lhs = b(l + g + 1.0) * b(d + g) * b(l) * b(d + 1.0)
            - b(l + g) * b(d + g + 1.0) * b(l + 1.0) * b(d);
        let rhs = b(ONE) * b(g) * b(-d + l) * b(d + l + g + 1.0);
        assert!(rel_diff(lhs, rhs) < 1e-12);
        let z = z_ik_sum(&p, &ctx, DeterminantPath::Direct).unwrap();
        assert!(rel_diff(z, b(l - d) / b(l)) < 1e-12);
    }

    #[test]
    fn terms_with_first_index_vanish_at_x1_eq_y1() {
        let ctx = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut p = ParamSampler::default().sample(3, &ctx, &mut rng).unwrap();
        p.x[0] = p.y[0];
        let terms = factored_terms(&p, &ctx).unwrap();
        assert_eq!(terms.len(), 8);
        for t in &terms {
            if t.subset & 1 == 1 {
                assert!(t.value.norm() < 1e-14);
            }
        }
        let z: C64 = terms.iter().map(|t| t.value).sum();
        assert!(rel_diff(z, z_bruteforce(&p, &ctx).unwrap()) < 1e-9);
        assert!(matches!(
            z_ik_sum(&p, &ctx, DeterminantPath::Direct),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn special_gamma_is_finite() {
        let ctx = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut p = ParamSampler::default().sample(3, &ctx, &mut rng).unwrap();
        p.gamma = Some(p.y_sum() - p.x_sum());
        let terms = factored_terms(&p, &ctx).unwrap();
        assert_eq!(terms[0].value, ZERO);
        let z = z_factored_sum(&p, &ctx).unwrap();
        assert!(rel_diff(z, z_bruteforce(&p, &ctx).unwrap()) < 1e-9);
    }

    #[test]
    fn n2_has_four_terms() {
        let ctx = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let p = ParamSampler::default().sample(2, &ctx, &mut rng).unwrap();
        assert_eq!(factored_terms(&p, &ctx).unwrap().len(), 4);
    }

    #[test]
    fn missing_gamma_is_domain_error() {
        let p = AdditiveParams::new(vec![c(0.1, 0.0)], vec![c(0.3, 0.0)], c(0.2, 0.0)).unwrap();
        assert!(matches!(z_factored_sum(&p, &ctx()), Err(Error::Domain(_))));
    }

    #[test]
    fn six_vertex_limit() {
        let ctx = ThetaContext::trigonometric(c(0.19, 0.07)).unwrap();
        let p = AdditiveParams::new(vec![c(0.4, 0.1)], vec![c(-0.3, 0.2)], ZERO).unwrap();
        let z = z_sixvertex_ik(&p, &ctx).unwrap();
        assert!(rel_diff(z, epi(ctx.eta() * (p.x[0] - p.y[0]))) < 1e-13);

        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let mut p = ParamSampler::default().sample(3, &ctx, &mut rng).unwrap();
        // |q^λ| = e^{−2π Im(ηλ)} < 1e−8
        p.lambda = c(0.3, 0.0) + c(0.0, 4.0) / ctx.eta();
        assert!(ctx.q_pow(p.lambda).norm() < 1e-8);
        let limit = z_sixvertex_ik(&p, &ctx).unwrap();
        let far = z_weightfunction(&p, &ctx).unwrap();
        assert!(rel_diff(limit, far) < 1e-6, "{limit} {far}");
        let collapsed = z_ik_sum(&p, &ctx, DeterminantPath::Direct).unwrap();
        assert!(rel_diff(limit, collapsed) < 1e-6);
        assert!(z_sixvertex_ik(&p, &ThetaContext::new(c(0.1, 0.0), c(0.2, 0.0)).unwrap()).is_err());
    }
}
