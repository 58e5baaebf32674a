mod common;

use locapprox::filters::{FilterKind, FilterSpec};
use locapprox::quadrature::QuadratureRule;
use locapprox::rng;
use locapprox::sphere::{self, HarmonicBasis2, SpherePoint};
use locapprox::zonal::{random_rotation, rotate, rotate_rule, synthesize, ZonalMask};
use proptest::prelude::*;
use rand::Rng;

fn probes(count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng::stream(seed, "prop-zonal-probes");
    sphere::uniform_points(2, count, &mut r)
        .into_iter()
        .map(SpherePoint::into_inner)
        .collect()
}

/// Random polynomial target of low degree with unit-scale coefficients.
fn target(seed: u64) -> impl Fn(&[f64]) -> f64 {
    let mut r = rng::stream(seed, "prop-zonal-target");
    let c: [f64; 6] = std::array::from_fn(|_| r.random_range(-1.0..1.0));
    move |x: &[f64]| c[0] + c[1] * x[0] * x[1] + c[2] * x[2] * x[2] + c[3] * x[0] + c[4] * x[1] * x[2] * x[0] + c[5] * x[1]
}

fn filter() -> FilterSpec {
    FilterSpec::new(FilterKind::Quintic)
}

#[test]
fn networks_from_even_targets_are_even() {
    let sampling = QuadratureRule::product_s2(17).unwrap();
    let discretizing = QuadratureRule::product_s2(17).unwrap();
    common::check(3, (any::<u64>(), 0usize..=1), |(seed, gamma)| {
        let even = |x: &[f64]| x[2] * x[2] - x[0] * x[1] + 0.3;
        let values: Vec<f64> = sampling.cloud.points().iter().map(|x| even(x)).collect();
        let net = synthesize(&sampling, &values, &discretizing, 8.0, gamma as f64, &filter()).unwrap();
        for x in probes(50, seed) {
            let minus: Vec<f64> = x.iter().map(|v| -v).collect();
            prop_assert!((net.eval(&x) - net.eval(&minus)).abs() < 1e-10);
        }
        Ok(())
    });
}

#[test]
fn synthesis_is_rotation_equivariant() {
    let sampling = QuadratureRule::product_s2(17).unwrap();
    let discretizing = QuadratureRule::product_s2(17).unwrap();
    common::check(3, any::<u64>(), |seed| {
        let f = target(seed);
        let values: Vec<f64> = sampling.cloud.points().iter().map(|x| f(x)).collect();
        let u = random_rotation(&mut rng::stream(seed, "prop-zonal-rotation"));
        let net = synthesize(&sampling, &values, &discretizing, 8.0, 0.0, &filter()).unwrap();
        let turned = synthesize(
            &rotate_rule(&sampling, &u).unwrap(),
            &values,
            &rotate_rule(&discretizing, &u).unwrap(),
            8.0,
            0.0,
            &filter(),
        )
        .unwrap();
        prop_assert_eq!(turned.len(), discretizing.len());
        for x in probes(50, seed) {
            let diff = (net.eval(&x) - turned.eval(&rotate(&u, &x))).abs();
            prop_assert!(diff < 1e-8, "difference {diff}");
        }
        Ok(())
    });
}

#[test]
fn tiny_networks_match_harmonic_double_sum() {
    let n = 4;
    let sampling = QuadratureRule::product_s2(7).unwrap();
    let discretizing = QuadratureRule::product_s2(9).unwrap();
    assert!(discretizing.len() <= 60);
    common::check(3, (any::<u64>(), 0usize..=2), |(seed, gamma)| {
        let gamma = [0.0, 0.25, 1.0][gamma];
        let f = target(seed);
        let values: Vec<f64> = sampling.cloud.points().iter().map(|x| f(x)).collect();
        let net = synthesize(&sampling, &values, &discretizing, n as f64, gamma, &filter()).unwrap();

        // Coefficients from the harmonic expansion instead of the zonal kernel.
        let basis = HarmonicBasis2::new(n);
        let mut row = vec![0.0; basis.dim()];
        let mut raw = vec![0.0; basis.dim()];
        for ((x, w), y) in sampling.cloud.points().iter().zip(&sampling.weights).zip(&values) {
            basis.eval_all(x, &mut row);
            raw.iter_mut().zip(&row).for_each(|(c, v)| *c += w * y * v);
        }
        for (i, c) in raw.iter_mut().enumerate() {
            *c *= filter().eval(HarmonicBasis2::degree_of(i) as f64 / n as f64);
        }
        let mask = ZonalMask::build(gamma, 2, n).unwrap();
        let inverse = mask.invert_harmonic_coeffs(&raw).unwrap();
        let exponent = 2.0 * gamma + 1.0;
        let oracle = |x: &[f64]| -> f64 {
            discretizing
                .cloud
                .points()
                .iter()
                .zip(&discretizing.weights)
                .map(|(c, w)| {
                    let mut at_c = vec![0.0; basis.dim()];
                    basis.eval_all(c, &mut at_c);
                    let coeff = w * at_c.iter().zip(&inverse).map(|(a, b)| a * b).sum::<f64>();
                    let t: f64 = x.iter().zip(c).map(|(a, b)| a * b).sum();
                    coeff * t.abs().powf(exponent)
                })
                .sum()
        };
        for x in probes(20, seed) {
            let (got, want) = (net.eval(&x), oracle(&x));
            prop_assert!((got - want).abs() <= 1e-12 * (1.0 + want.abs()), "{got} vs {want}");
        }
        Ok(())
    });
}
