mod common;

use locapprox::rng;
use locapprox::sphere::{self, HarmonicBasis2, SpherePoint};
use locapprox::sphere_approx::{
    benchmark_table2, fit, ApproxMethod, BenchmarkConfig, ErrorHistogram, FitOptions, THRESHOLD_EXPONENTS,
};
use proptest::prelude::*;
use rand::Rng;

fn random_points(count: usize, seed: u64, label: &str) -> Vec<Vec<f64>> {
    let mut r = rng::stream(seed, label);
    sphere::uniform_points(2, count, &mut r)
        .into_iter()
        .map(SpherePoint::into_inner)
        .collect()
}

fn small_benchmark() -> BenchmarkConfig {
    BenchmarkConfig {
        degree: 16,
        train: 4096,
        test: 2000,
        fit: FitOptions::for_degree(16),
        sample_mean_rows: false,
    }
}

#[test]
fn smoothed_models_reproduce_low_degree_polynomials() {
    let n = 12;
    common::check(2, any::<u64>(), |seed| {
        let points = random_points(1500, seed, "prop-repro-points");
        let low = HarmonicBasis2::new(n / 2);
        let mut r = rng::stream(seed, "prop-repro-coeffs");
        let c: Vec<f64> = (0..low.dim()).map(|_| r.random_range(-1.0..1.0)).collect();
        let poly = |x: &[f64]| {
            let mut row = vec![0.0; low.dim()];
            low.eval_all(x, &mut row);
            row.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>()
        };
        let values: Vec<f64> = points.iter().map(|x| poly(x)).collect();
        let probes = random_points(200, seed, "prop-repro-probes");
        for method in [ApproxMethod::Qs5, ApproxMethod::Ms5] {
            let model = fit(method, &points, &values, n, &FitOptions::for_degree(n)).unwrap();
            prop_assert_eq!(model.coeffs.len(), n * n);
            let approx = model.eval_many(&probes);
            let err = probes
                .iter()
                .zip(&approx)
                .map(|(x, a)| (a - poly(x)).abs())
                .fold(0.0, f64::max);
            prop_assert!(err < 1e-7, "{method}: error {err}");
        }
        Ok(())
    });
}

#[test]
fn histogram_columns_are_monotone_and_bounded() {
    let errors = prop::collection::vec(0.0f64..1.0, 1..400).prop_flat_map(|base| {
        let len = base.len();
        (Just(base), prop::collection::vec(0i32..14, len))
    });
    common::check(64, errors, |(base, scale)| {
        let errors: Vec<f64> = base.iter().zip(&scale).map(|(b, s)| b * 10f64.powi(-s)).collect();
        let h = ErrorHistogram::from_errors(&errors, &THRESHOLD_EXPONENTS);
        for w in h.percent_below.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        prop_assert!(h.percent_below.iter().all(|p| (0.0..=100.0).contains(p)));
        Ok(())
    });
}

#[test]
fn benchmark_is_deterministic_and_favours_localized_reconstruction() {
    let config = small_benchmark();
    for seed in common::SEEDS {
        let first = benchmark_table2(seed, &config).unwrap();
        let second = benchmark_table2(seed, &config).unwrap();
        assert_eq!(first, second, "seed {seed}");
        let ls = first.row("LS").unwrap();
        let qs5 = first.row("QS5").unwrap();
        for x in [6, 7, 8] {
            assert!(
                qs5.at(x).unwrap() >= ls.at(x).unwrap(),
                "seed {seed}, 1e-{x}: QS5 {:?} LS {:?}",
                qs5.at(x),
                ls.at(x)
            );
        }
    }
}
