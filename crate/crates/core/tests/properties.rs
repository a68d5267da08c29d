use proptest::prelude::*;
use scolb::bounds::bernoulli_kl;
use scolb::ensembles::{make_instance, ClassSpec, OracleKind};
use scolb::norms::PNorm;
use scolb::packing::{build_dense_packing, build_sparse_packing, hamming_distance, verify_packing};
use scolb::solvers::{mirror_step, FeasibleSet, Prox};

fn spec_strategy() -> impl Strategy<Value = ClassSpec> {
    (1usize..6, 0.5f64..2.0, 0.2f64..1.0, 0.01f64..0.25, 0.0f64..0.9, 0usize..3).prop_map(
        |(dim, l, r, delta, theta, which)| match which {
            0 => ClassSpec::convex(dim, l, PNorm::TWO, r, delta, OracleKind::B),
            1 => ClassSpec::strongly_convex(dim, l, PNorm::ONE, r, delta, theta, OracleKind::A),
            _ => ClassSpec::sparse(dim.max(2), 1, l, r, delta),
        },
    )
}

fn alpha_for(spec: &ClassSpec, bits: u32) -> Vec<i8> {
    let sign = |i: usize| if bits >> i & 1 == 1 { 1 } else { -1 };
    if spec.sparsity > 0 && spec.kind == scolb::ensembles::ClassKind::SparseOpt {
        let mut a = vec![0; spec.dim];
        a[(bits as usize >> 8) % spec.dim] = sign(0);
        a
    } else {
        (0..spec.dim).map(sign).collect()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dense_packings_verify(dim in 1usize..40, seed in any::<u64>()) {
        let set = build_dense_packing(dim, seed).unwrap();
        prop_assert!(verify_packing(&set).ok);
    }

    #[test]
    fn sparse_packings_verify(dim in 4usize..40, k in 1usize..3, seed in any::<u64>()) {
        let set = build_sparse_packing(dim, k, seed).unwrap();
        prop_assert!(verify_packing(&set).ok);
        prop_assert!(set.vertices().iter().all(|v| v.iter().filter(|&&x| x != 0).count() == k));
    }

    #[test]
    fn hamming_is_symmetric(a in prop::collection::vec(-1i8..=1, 12), b in prop::collection::vec(-1i8..=1, 12)) {
        prop_assert_eq!(hamming_distance(&a, &b).unwrap(), hamming_distance(&b, &a).unwrap());
        prop_assert_eq!(hamming_distance(&a, &a).unwrap(), 0);
    }

    #[test]
    fn minimizer_is_global(spec in spec_strategy(), bits in any::<u32>(), u in prop::collection::vec(-1.0f64..1.0, 6)) {
        let g = make_instance(&spec, &alpha_for(&spec, bits)).unwrap();
        let x: Vec<f64> = u.iter().take(spec.dim).map(|v| v * spec.radius).collect();
        prop_assert!(g.gap(&x).unwrap() >= -1e-12);
        prop_assert!((g.eval(g.minimizer()).unwrap() - g.min_value()).abs() <= 1e-12);
    }

    #[test]
    fn subgradient_inequality(
        spec in spec_strategy(),
        bits in any::<u32>(),
        u in prop::collection::vec(-1.0f64..1.0, 6),
        w in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        let g = make_instance(&spec, &alpha_for(&spec, bits)).unwrap();
        let x: Vec<f64> = u.iter().take(spec.dim).map(|v| v * spec.radius).collect();
        let y: Vec<f64> = w.iter().take(spec.dim).map(|v| v * spec.radius).collect();
        let s = g.subgradient(&x).unwrap();
        let lin: f64 = s.iter().zip(y.iter().zip(&x)).map(|(si, (yi, xi))| si * (yi - xi)).sum();
        prop_assert!(g.eval(&y).unwrap() >= g.eval(&x).unwrap() + lin - 1e-12);
    }

    #[test]
    fn mirror_steps_stay_feasible(
        x in prop::collection::vec(-0.5f64..0.5, 5),
        grad in prop::collection::vec(-3.0f64..3.0, 5),
        eta in 0.01f64..2.0,
        a in 1.05f64..2.0,
    ) {
        let set = FeasibleSet::Box { radius: 0.5 };
        for prox in [Prox::EuclideanHalf, Prox::power(a).unwrap()] {
            let next = mirror_step(prox, &set, &x, &grad, eta, 1e-10, 10_000).unwrap();
            prop_assert!(set.contains(&next, 1e-12));
        }
        let euclid = mirror_step(Prox::EuclideanHalf, &set, &x, &grad, eta, 1e-10, 10_000).unwrap();
        for i in 0..5 {
            prop_assert!((euclid[i] - (x[i] - eta * grad[i]).clamp(-0.5, 0.5)).abs() <= 1e-12);
        }
    }

    #[test]
    fn kl_is_increasing(a in 1e-6f64..0.25, b in 1e-6f64..0.25) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(bernoulli_kl(lo).unwrap() <= bernoulli_kl(hi).unwrap() + 1e-15);
    }
}
