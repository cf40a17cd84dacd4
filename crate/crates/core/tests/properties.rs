use polysig::finitediff::{self, FdConfig, FdOrder};
use polysig::gram::{gram, mmd2, permutation_test, Scheme, SolverConfig};
use polysig::paths::{
    rect_coeff, refine_path, sample_brownian, sample_brownian_batch, sample_sincos_batch,
    PiecewiseLinearPath,
};
use polysig::polyapprox;
use polysig::polyinterp::{self, chebyshev_nodes, fit_polynomial};
use polysig::sigoracle::{signature, truncated_kernel, OracleConfig};
use proptest::prelude::*;

/// Paths with 2..=6 points in `dim` dimensions and coordinates in [-1, 1].
fn path(dim: usize) -> impl Strategy<Value = PiecewiseLinearPath> {
    (2usize..=6).prop_flat_map(move |n| {
        proptest::collection::vec(-1.0f64..1.0, n * dim)
            .prop_map(move |v| PiecewiseLinearPath::new(polysig::paths::uniform_times(n), v, dim).unwrap())
    })
}

fn path_pair() -> impl Strategy<Value = (PiecewiseLinearPath, PiecewiseLinearPath)> {
    (1usize..=3).prop_flat_map(|d| (path(d), path(d)))
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Relative error floored at unit scale, for kernels that may sit near zero.
fn rel1(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polyapprox_is_symmetric((x, y) in path_pair()) {
        let a = polyapprox::kernel(&x, &y, 12).unwrap();
        let b = polyapprox::kernel(&y, &x, 12).unwrap();
        prop_assert!(rel1(a, b) < 1e-12, "{} vs {}", a, b);
    }

    #[test]
    fn polyinterp_is_symmetric((x, y) in path_pair()) {
        let a = polyinterp::kernel(&x, &y, 10).unwrap();
        let b = polyinterp::kernel(&y, &x, 10).unwrap();
        prop_assert!(rel1(a, b) < 1e-11, "{} vs {}", a, b);
    }

    #[test]
    fn oracle_is_bitwise_symmetric((x, y) in path_pair()) {
        let cfg = OracleConfig::with_level(8);
        prop_assert_eq!(
            truncated_kernel(&x, &y, &cfg).unwrap().to_bits(),
            truncated_kernel(&y, &x, &cfg).unwrap().to_bits()
        );
    }

    #[test]
    fn refinement_preserves_the_kernel(seed in 0u64..10_000, lx in 4usize..10, ly in 4usize..10, f in 2usize..4) {
        // Brownian pairs with at least three steps keep every cell's
        // coefficient small enough for order 16 to be converged; refining
        // would otherwise shrink a truncation error the base solve still has.
        let x = sample_brownian(seed, lx, 2).unwrap();
        let y = sample_brownian(seed + 1, ly, 2).unwrap();
        let a = polyapprox::kernel(&x, &y, 16).unwrap();
        let b = polyapprox::kernel(&refine_path(&x, f).unwrap(), &y, 16).unwrap();
        prop_assert!(rel1(b, a) < 1e-12, "{} vs {}", a, b);
    }

    #[test]
    fn refinement_preserves_the_signature(x in path(2)) {
        let cfg = OracleConfig::with_level(6);
        let a = signature(&x, &cfg).unwrap();
        let b = signature(&x.refine(2).unwrap(), &cfg).unwrap();
        for k in 0..=6 {
            for (u, v) in a.block(k).iter().zip(b.block(k)) {
                prop_assert!((u - v).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn refinement_composes(x in path(2), a in 1usize..4, b in 1usize..4) {
        let once = refine_path(&x, a * b).unwrap();
        let twice = refine_path(&refine_path(&x, a).unwrap(), b).unwrap();
        prop_assert_eq!(once.len(), twice.len());
        for (u, v) in once.times().iter().zip(twice.times()) {
            prop_assert!((u - v).abs() < 1e-14);
        }
        for (u, v) in once.values().iter().zip(twice.values()) {
            prop_assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn rect_coeff_is_bilinear((x, y) in path_pair(), alpha in -3.0f64..3.0) {
        prop_assume!(alpha != 0.0);
        let base = rect_coeff(&x, &y, 0, 0).unwrap();
        let scaled = rect_coeff(&x.scaled(alpha).unwrap(), &y, 0, 0).unwrap();
        prop_assert!((scaled.c - alpha * base.c).abs() <= 1e-12 * (1.0 + base.c.abs()));
        prop_assert_eq!((scaled.ds, scaled.dt), (base.ds, base.dt));
    }

    #[test]
    fn constant_path_gives_one(y in path(2), v in -2.0f64..2.0) {
        let c = PiecewiseLinearPath::new(vec![0.0, 0.5, 1.0], vec![v, -v, v, -v, v, -v], 2).unwrap();
        prop_assert_eq!(polyapprox::kernel(&c, &y, 8).unwrap(), 1.0);
        prop_assert_eq!(polyinterp::kernel(&c, &y, 8).unwrap(), 1.0);
        prop_assert_eq!(finitediff::solve(&c, &y, &FdConfig::new(FdOrder::Second, 3)).unwrap(), 1.0);
        prop_assert_eq!(truncated_kernel(&c, &y, &OracleConfig::with_level(6)).unwrap(), 1.0);
    }

    #[test]
    fn fit_reproduces_polynomials(coeffs in proptest::collection::vec(-2.0f64..2.0, 1..8), lo in -1.0f64..1.0, w in 0.1f64..2.0) {
        let order = 8;
        let nodes = chebyshev_nodes(lo, lo + w, order + 1).unwrap();
        let samples: Vec<f64> = nodes
            .iter()
            .map(|s| coeffs.iter().rev().fold(0.0, |acc, c| acc * (s - lo) + c))
            .collect();
        let fit = fit_polynomial(&nodes, &samples, lo).unwrap();
        for (n, c) in fit.coeffs.iter().enumerate() {
            let expect = coeffs.get(n).copied().unwrap_or(0.0);
            prop_assert!((c - expect).abs() < 1e-9 / w.powi(n as i32).min(1.0), "coefficient {}: {} vs {}", n, c, expect);
        }
        for s in [lo, lo + 0.37 * w, lo + w] {
            let exact = coeffs.iter().rev().fold(0.0, |acc, c| acc * (s - lo) + c);
            prop_assert!((fit.eval(s) - exact).abs() < 1e-12 * (1.0 + exact.abs()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gram_is_deterministic_and_symmetric(seed in 0u64..1000, workers in 2usize..5) {
        let xs = sample_brownian_batch(seed, 4, 5, 2).unwrap();
        let solver = SolverConfig::new(Scheme::PolyApprox { order: 8 });
        let one = gram(&xs, &xs, &solver).unwrap();
        prop_assert_eq!(&one, &gram(&xs, &xs, &solver.with_workers(workers)).unwrap());
        for i in 0..4 {
            for j in 0..4 {
                prop_assert_eq!(one.get(i, j), one.get(j, i));
            }
        }
    }

    #[test]
    fn permutation_p_value_in_unit_interval(seed in 0u64..1000) {
        let xs = sample_brownian_batch(seed, 3, 4, 2).unwrap();
        let ys = sample_brownian_batch(seed + 1, 4, 4, 2).unwrap();
        let p = permutation_test(&xs, &ys, &SolverConfig::new(Scheme::PolyApprox { order: 8 }), 30, seed).unwrap();
        prop_assert!(p > 0.0 && p <= 1.0);
        prop_assert!(p >= 1.0 / 31.0);
    }
}

#[test]
fn biased_mmd_is_nonnegative() {
    let solver = SolverConfig::new(Scheme::PolyApprox { order: 10 });
    for seed in 0..100u64 {
        let xs = sample_brownian_batch(2 * seed, 3, 5, 2).unwrap();
        let ys = sample_brownian_batch(2 * seed + 1, 3, 5, 2).unwrap();
        let v = mmd2(&xs, &ys, &solver, false).unwrap();
        assert!(v >= -1e-10, "seed {seed}: {v}");
    }
}

#[test]
fn brownian_increment_variance() {
    let points = 10;
    let mut sum = 0.0;
    let mut count = 0usize;
    for seed in 0..10_000u64 {
        let p = sample_brownian(seed, points, 2).unwrap();
        for i in 0..p.segments() {
            for v in p.increment(i) {
                sum += v * v;
                count += 1;
            }
        }
    }
    let var = sum / count as f64;
    let expected = 1.0 / (points - 1) as f64;
    assert!(rel(var, expected) < 0.1, "{var} vs {expected}");
}

#[test]
fn sincos_mean_of_cosine_paths() {
    let (_, ys) = sample_sincos_batch(17, 10_000, 2).unwrap();
    let values: Vec<f64> = ys.iter().flat_map(|p| p.values().to_vec()).collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    assert!(rel(mean, (-0.5f64).exp()) < 0.02, "{mean}");
}

#[test]
fn brownian_is_reproducible() {
    assert_eq!(sample_brownian(42, 12, 3).unwrap(), sample_brownian(42, 12, 3).unwrap());
    assert_ne!(sample_brownian(42, 12, 3).unwrap(), sample_brownian(43, 12, 3).unwrap());
}
