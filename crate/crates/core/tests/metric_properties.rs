mod common;

use proptest::prelude::*;
use qfivol_core::matrix::{DensityMatrix, HermitianMatrix};
use qfivol_core::metrics::{covariance, MetricContext};
use qfivol_core::random::sample_pure;

fn combo(a: &HermitianMatrix, s: f64, c: &HermitianMatrix, t: f64) -> HermitianMatrix {
    a.scale(s).add_scaled(c, t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn forms_are_symmetric_and_bilinear(
        seed in any::<u64>(),
        dim in 2usize..=5,
        s in -3.0f64..3.0,
        t in -3.0f64..3.0,
    ) {
        let rho = common::state(seed, dim, false);
        let obs = common::observables(seed, dim, 3, false);
        let (a, b, c) = (&obs[0], &obs[1], &obs[2]);
        let ac = combo(a, s, c, t);
        for f in common::regular_builtins() {
            let ctx = MetricContext::new(&rho, &f).unwrap();
            type Form = fn(&MetricContext, &HermitianMatrix, &HermitianMatrix) -> f64;
            let forms: [(&str, Form); 3] = [
                ("cov", |m, x, y| m.covariance(x, y).unwrap()),
                ("qfi", |m, x, y| m.qfi_inner(x, y).unwrap()),
                ("corr", |m, x, y| m.f_correlation(x, y).unwrap()),
            ];
            for (name, form) in forms {
                let ab = form(&ctx, a, b);
                prop_assert!(common::rel_diff(ab, form(&ctx, b, a)) < 1e-10, "{name} symmetry");
                let lhs = form(&ctx, &ac, b);
                let rhs = s * ab + t * form(&ctx, c, b);
                let scale = (s.abs() * ab.abs() + t.abs() * form(&ctx, c, b).abs()).max(1.0);
                prop_assert!((lhs - rhs).abs() < 1e-10 * scale, "{name} linearity: {lhs} vs {rhs}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn correlation_is_nonnegative(seed in any::<u64>(), dim in 3usize..=6, faithful in any::<bool>()) {
        let rho = if faithful { common::state(seed, dim, false) } else { common::rank_two_state(seed, dim) };
        prop_assert_eq!(rho.is_faithful(), faithful);
        let a = &common::observables(seed, dim, 1, false)[0];
        for f in common::regular_builtins() {
            let ctx = MetricContext::new(&rho, &f).unwrap();
            let v = ctx.f_correlation(a, a).unwrap();
            prop_assert!(v >= -1e-12, "{} gives {v:e}", f.id());
            prop_assert!(v <= ctx.covariance(a, a).unwrap() + 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn commutator_identity(seed in any::<u64>(), dim in 2usize..=6) {
        let rho = common::state(seed, dim, false);
        let obs = common::observables(seed, dim, 2, false);
        for f in common::regular_builtins() {
            let ctx = MetricContext::new(&rho, &f).unwrap();
            let corr = ctx.f_correlation(&obs[0], &obs[1]).unwrap();
            let residual = ctx.identity_residual(&obs[0], &obs[1]).unwrap();
            prop_assert!(residual <= 1e-9 * corr.abs().max(1.0), "{}: residual {residual:e}", f.id());
        }
    }

    #[test]
    fn pure_state_correlation_equals_covariance(seed in any::<u64>(), dim in 2usize..=6) {
        let rho = sample_pure(seed, dim, 0).unwrap();
        let obs = common::observables(seed, dim, 2, false);
        let cov = covariance(&rho, &obs[0], &obs[1]).unwrap();
        for f in common::regular_builtins() {
            let ctx = MetricContext::new(&rho, &f).unwrap();
            prop_assert!((ctx.f_correlation(&obs[0], &obs[1]).unwrap() - cov).abs() < 1e-12);
            prop_assert!(ctx.tilde_trace(&obs[0], &obs[1]).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn commuting_observable_has_zero_correlation(
        probs in proptest::collection::vec(0.01f64..1.0, 2..=6),
        diag in proptest::collection::vec(-5.0f64..5.0, 6),
    ) {
        let total: f64 = probs.iter().sum();
        let p: Vec<f64> = probs.iter().map(|v| v / total).collect();
        let rho = DensityMatrix::diagonal(&p).unwrap();
        let a = HermitianMatrix::from_diagonal(&diag[..p.len()]);
        for f in common::regular_builtins() {
            let ctx = MetricContext::new(&rho, &f).unwrap();
            prop_assert!(ctx.f_correlation(&a, &a).unwrap().abs() < 1e-12);
        }
    }
}
