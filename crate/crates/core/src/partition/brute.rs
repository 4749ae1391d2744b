use super::params::{AdditiveParams, MultiplicativeParams};
use super::weights::{additive_weights, multiplicative_weights, TrackedSum};
use crate::error::{Error, Result};
use crate::scalar::{epi, C64};
use crate::state_space::DEFAULT_STATE_CAP;
use crate::theta::ThetaContext;

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::Resource { n, cap })
    } else {
        Ok(())
    }
}

/// `Z_n(x; y; λ)` as the sum over all states of the product of local weights.
pub fn z_bruteforce(params: &AdditiveParams, ctx: &ThetaContext) -> Result<C64> {
    z_bruteforce_capped(params, ctx, DEFAULT_STATE_CAP)
}

pub fn z_bruteforce_capped(params: &AdditiveParams, ctx: &ThetaContext, cap: usize) -> Result<C64> {
    check_cap(params.n(), cap)?;
    additive_weights(params, ctx)?.sum_all()
}

/// [`z_bruteforce_capped`] with the magnitude of the summed terms.
pub fn z_bruteforce_tracked(
    params: &AdditiveParams,
    ctx: &ThetaContext,
    cap: usize,
) -> Result<TrackedSum> {
    check_cap(params.n(), cap)?;
    additive_weights(params, ctx)?.sum_all_tracked()
}

/// `Z̃_n(x; y; λ)` as a state sum with multiplicative local weights.
pub fn z_tilde(params: &MultiplicativeParams, ctx: &ThetaContext) -> Result<C64> {
    z_tilde_capped(params, ctx, DEFAULT_STATE_CAP)
}

pub fn z_tilde_capped(
    params: &MultiplicativeParams,
    ctx: &ThetaContext,
    cap: usize,
) -> Result<C64> {
    check_cap(params.n(), cap)?;
    multiplicative_weights(params, ctx)?.sum_all()
}

/// [`z_tilde_capped`] with the magnitude of the summed terms.
pub fn z_tilde_tracked(
    params: &MultiplicativeParams,
    ctx: &ThetaContext,
    cap: usize,
) -> Result<TrackedSum> {
    check_cap(params.n(), cap)?;
    multiplicative_weights(params, ctx)?.sum_all_tracked()
}

/// The factor `q^{n(|x|+|y|)/2}` relating `Z_n` to `Z̃_n`.
pub fn tilde_factor(params: &AdditiveParams, ctx: &ThetaContext) -> C64 {
    let n = params.n() as f64;
    epi(ctx.eta() * n * (params.x_sum() + params.y_sum()))
}

/// `Z̃_n` at `q^x, q^y, q^λ`, computed as `q^{n(|x|+|y|)/2} Z_n(x; y; λ)`.
pub fn z_tilde_from_additive(params: &AdditiveParams, ctx: &ThetaContext) -> Result<C64> {
    Ok(tilde_factor(params, ctx) * z_bruteforce(params, ctx)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::params::ParamSampler;
    use crate::partition::weights::boltzmann_weight;
    use crate::scalar::{c, rel_diff};
    use crate::state_space::{BlockKind, StateIter};
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> ThetaContext {
        ThetaContext::new(c(0.0, 0.2), c(0.13, 0.02)).unwrap()
    }

    #[test]
    fn n1_single_block() {
        let ctx = ctx();
        let p = AdditiveParams::new(vec![c(0.3, 0.1)], vec![c(-0.2, 0.05)], c(0.4, -0.1)).unwrap();
        let z = z_bruteforce(&p, &ctx).unwrap();
        let want =
            ctx.bracket(p.lambda - p.x[0] + p.y[0]).unwrap() / ctx.bracket(p.lambda).unwrap();
        assert!(rel_diff(z, want) < 1e-13);
    }

    #[test]
    fn n2_two_state_expression() {
        let ctx = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = ParamSampler::default().sample(2, &ctx, &mut rng).unwrap();
        let (x, y, l) = (&p.x, &p.y, p.lambda);
        let r = |k, lam, u| boltzmann_weight(k, lam, u, &ctx).unwrap();
        // identity ASM: blocks (0,1;1,0), (1,2;0,1), (1,0;2,1), (0,1;1,0) shifted
        let first = r(BlockKind::PlusMinusMinusPlus, l, x[0] - y[0])
            * r(BlockKind::PlusMinusPlusMinus, l + 1.0, x[0] - y[1])
            * r(BlockKind::MinusPlusMinusPlus, l + 1.0, x[1] - y[0])
            * r(BlockKind::PlusMinusMinusPlus, l, x[1] - y[1]);
        let second = r(BlockKind::UpUp, l, x[0] - y[0])
            * r(BlockKind::PlusMinusMinusPlus, l + 1.0, x[0] - y[1])
            * r(BlockKind::PlusMinusMinusPlus, l + 1.0, x[1] - y[0])
            * r(BlockKind::DownDown, l + 2.0, x[1] - y[1]);
        let z = z_bruteforce(&p, &ctx).unwrap();
        assert!(rel_diff(z, first + second) < 1e-12);
    }

    #[test]
    fn multiplicative_matches_rescaled_additive() {
        let ctx = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=4 {
            let p = ParamSampler::default().sample(n, &ctx, &mut rng).unwrap();
            let direct = z_tilde(&p.to_multiplicative(&ctx), &ctx).unwrap();
            let via = z_tilde_from_additive(&p, &ctx).unwrap();
            assert!(rel_diff(direct, via) < 1e-10, "n={n}");
        }
    }

    #[test]
    fn n1_tilde_closed_form() {
        let ctx = ctx();
        let m =
            MultiplicativeParams::new(vec![c(0.7, 0.4)], vec![c(-0.3, 1.1)], c(0.5, -0.6)).unwrap();
        let z = z_tilde(&m, &ctx).unwrap();
        let want =
            m.x[0] * ctx.theta(m.lambda * m.y[0] / m.x[0]).unwrap() / ctx.theta(m.lambda).unwrap();
        assert!(rel_diff(z, want) < 1e-13);
    }

    #[test]
    fn tilde_invariant_under_period_shift() {
        let ctx = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = ParamSampler::default().sample(3, &ctx, &mut rng).unwrap();
        let mut shifted = p.clone();
        shifted.x[1] += C64::new(1.0, 0.0) / ctx.eta();
        shifted.y[2] -= C64::new(1.0, 0.0) / ctx.eta();
        shifted.lambda += C64::new(1.0, 0.0) / ctx.eta();
        let a = z_tilde_from_additive(&p, &ctx).unwrap();
        let b = z_tilde_from_additive(&shifted, &ctx).unwrap();
        assert!(rel_diff(a, b) < 1e-9);
    }

    #[test]
    fn partitions_add_up() {
        let ctx = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = ParamSampler::default().sample(4, &ctx, &mut rng).unwrap();
        let table = additive_weights(&p, &ctx).unwrap();
        let parts: C64 = (1..=4).map(|k| table.sum_partition(k).unwrap()).sum();
        assert!(rel_diff(parts, table.sum_all().unwrap()) < 1e-12);
        assert_eq!(StateIter::new(4).unwrap().count(), 42);
    }

    #[test]
    fn cap_and_empty() {
        let ctx = ctx();
        let p = AdditiveParams::new(vec![], vec![], c(0.3, 0.0)).unwrap();
        assert_eq!(z_bruteforce(&p, &ctx).unwrap(), c(1.0, 0.0));
        let big =
            AdditiveParams::new(vec![c(0.1, 0.0); 3], vec![c(0.2, 0.0); 3], c(0.3, 0.0)).unwrap();
        assert!(matches!(
            z_bruteforce_capped(&big, &ctx, 2),
            Err(Error::Resource { n: 3, cap: 2 })
        ));
    }

    #[test]
    fn pole_names_factor() {
        let ctx = ctx();
        let p = AdditiveParams::new(vec![c(0.1, 0.0)], vec![c(0.2, 0.0)], c(0.0, 0.0)).unwrap();
        match z_bruteforce(&p, &ctx) {
            Err(Error::Pole { factor }) => assert!(factor.contains('λ')),
            other => panic!("{other:?}"),
        }
    }
}
