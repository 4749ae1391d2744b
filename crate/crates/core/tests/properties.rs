use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sosdw_core::enumeration::{
    colour_probabilities_closed, kuperberg_limit_det, third_power_scaled,
};
use sosdw_core::partition::{
    z_bruteforce, z_factored_sum, z_ik_sum, z_weightfunction, DeterminantPath, ParamSampler,
};
use sosdw_core::scalar::{c, rel_diff, C64, RESOLVABLE_CONDITION};
use sosdw_core::state_space::{a_n, c_n, AlternatingSignMatrix, HeightMatrix, StateIter};
use sosdw_core::theta::{
    addition_residual, frobenius_det, theta_decompose_residual, Convention, ThetaContext,
};

fn complex(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| c(a, b))
}

fn context() -> impl Strategy<Value = ThetaContext> {
    (complex(0.35), 0.08f64..0.45, -0.05f64..0.05)
        .prop_filter_map("degenerate η", |(p, re, im)| {
            ThetaContext::new(p, c(re, im)).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bracket_is_odd(ctx in context(), x in complex(2.0)) {
        let a = ctx.bracket(x).unwrap();
        let b = ctx.bracket(-x).unwrap();
        prop_assert!((a + b).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn bracket_quasi_periods(ctx in context(), x in complex(1.0)) {
        let eta = ctx.eta();
        let fx = ctx.bracket(x).unwrap();
        prop_assert!(rel_diff(ctx.bracket(x + C64::new(1.0, 0.0) / eta).unwrap(), -fx) < 1e-9);
        if let Some(tau) = ctx.tau() {
            let factor = -sosdw_core::scalar::e2pi(-eta * x) * sosdw_core::scalar::epi(-tau);
            prop_assert!(rel_diff(ctx.bracket(x + tau / eta).unwrap(), factor * fx) < 1e-9);
        }
    }

    #[test]
    fn addition_formula(ctx in context(), x in complex(1.0), y in complex(1.0), u in complex(1.0), v in complex(1.0)) {
        prop_assert!(addition_residual(x, y, u, v, &ctx).unwrap().relative() < 1e-9);
    }

    #[test]
    fn frobenius_both_conventions(ctx in context(), n in 1usize..=6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = ParamSampler::default().sample(n, &ctx, &mut rng).unwrap();
        let t = p.gamma.unwrap();
        let add = frobenius_det(&p.x, &p.y, t, &ctx, Convention::Additive).unwrap();
        let m = p.to_multiplicative(&ctx);
        let mul = frobenius_det(&m.x, &m.y, m.gamma.unwrap(), &ctx, Convention::Multiplicative).unwrap();
        prop_assume!(add.condition().max(mul.condition()) <= RESOLVABLE_CONDITION);
        prop_assert!(add.relative_error() < 1e-9, "{:?}", add);
        prop_assert!(mul.relative_error() < 1e-9, "{:?}", mul);
    }

    #[test]
    fn theta_decomposition(ctx in context(), big_n in 2u32..=5, a in complex(1.5), x in complex(1.5)) {
        prop_assume!(a.norm() > 0.05 && x.norm() > 0.05);
        match theta_decompose_residual(a, x, big_n, &ctx) {
            Ok(r) => prop_assert!(r.relative() < 1e-8, "{:?}", r),
            Err(_) => prop_assume!(false),
        }
    }

    #[test]
    fn evaluators_agree(ctx in context(), n in 1usize..=3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = ParamSampler::default();
        let p = s.sample(n, &ctx, &mut rng).unwrap();
        let z = z_bruteforce(&p, &ctx).unwrap();
        prop_assert!(rel_diff(z, z_weightfunction(&p, &ctx).unwrap()) < 1e-8);
        prop_assert!(rel_diff(z, z_ik_sum(&p, &ctx, DeterminantPath::Direct).unwrap()) < 1e-8);
        prop_assert!(rel_diff(z, z_factored_sum(&p, &ctx).unwrap()) < 1e-8);
        let other = s.resample_gamma(&p, &ctx, &mut rng).unwrap();
        prop_assert!(rel_diff(
            z_ik_sum(&p, &ctx, DeterminantPath::Frobenius).unwrap(),
            z_ik_sum(&other, &ctx, DeterminantPath::Frobenius).unwrap(),
        ) < 1e-9);
    }

    #[test]
    fn probabilities_sum_to_one(n in 1usize..80) {
        let p = colour_probabilities_closed(n);
        let total: BigRational = p.iter().cloned().sum();
        prop_assert!(total.is_one());
    }

    #[test]
    fn limit_determinant(n in 1usize..=20) {
        prop_assert_eq!(kuperberg_limit_det(n, 1, 3).unwrap(), third_power_scaled(n, a_n(n)));
        prop_assert_eq!(kuperberg_limit_det(n, 2, 3).unwrap(), third_power_scaled(n, c_n(n)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn asm_round_trip(n in 1usize..=5, pick in any::<prop::sample::Index>()) {
        let states: Vec<HeightMatrix> = StateIter::new(n).unwrap().collect();
        let h = pick.get(&states);
        let asm: AlternatingSignMatrix = h.to_asm();
        prop_assert_eq!(&asm.to_height(), h);
        prop_assert_eq!(asm.count_minus(), h.statistics().n_minus);
        let s = h.statistics();
        prop_assert_eq!(s.k_mod3.iter().sum::<usize>(), (n + 1) * (n + 1));
        prop_assert_eq!(s.m_mod8.iter().sum::<usize>(), n * n);
    }
}
