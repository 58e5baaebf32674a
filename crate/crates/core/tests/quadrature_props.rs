mod common;

use locapprox::quadrature::{self, test_basis, Domain, PointCloud};
use locapprox::rng;
use proptest::prelude::*;
use rand::Rng;

fn random_cloud(domain: Domain, count: usize, seed: u64) -> PointCloud {
    let mut r = rng::stream(seed, "prop-cloud");
    let pts: Vec<Vec<f64>> = (0..count).map(|_| domain.sample(&mut r)).collect();
    match domain {
        Domain::Sphere(q) => PointCloud::sphere(q, pts).unwrap(),
        Domain::Torus(q) => PointCloud::torus(q, pts).unwrap(),
    }
}

fn domain() -> impl Strategy<Value = (Domain, usize, usize)> {
    prop_oneof![
        (Just(Domain::Sphere(2)), 400usize..700, 4usize..=8),
        (Just(Domain::Torus(1)), 60usize..120, 4usize..=16),
        (Just(Domain::Torus(2)), 300usize..500, 3usize..=6),
    ]
}

#[test]
fn rules_integrate_normalized_polynomials() {
    common::check(6, (domain(), any::<u64>()), |((domain, count, order), seed)| {
        let cloud = random_cloud(domain, count, seed);
        let rule = quadrature::solve_weights(&cloud, order).unwrap();
        let basis = test_basis(domain, order).unwrap();
        let mut r = rng::stream(seed, "prop-polynomials");
        for _ in 0..50 {
            let mut c: Vec<f64> = (0..basis.dim()).map(|_| r.random_range(-1.0..1.0)).collect();
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            c.iter_mut().for_each(|v| *v /= norm);
            let integral = rule.integrate(|x| {
                let mut row = vec![0.0; basis.dim()];
                basis.eval_into(x, &mut row);
                row.iter().zip(&c).map(|(a, b)| a * b).sum()
            });
            prop_assert!(
                (integral - c[0]).abs() < 10.0 * rule.moment_residual,
                "error {} residual {}",
                (integral - c[0]).abs(),
                rule.moment_residual
            );
        }
        let total: f64 = rule.weights.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-8);
        Ok(())
    });
}

#[test]
fn pruning_at_half_mesh_norm_keeps_coverage() {
    common::check(4, (any::<u64>(), 150usize..300), |(seed, count)| {
        let domain = if seed % 2 == 0 { Domain::Sphere(2) } else { Domain::Torus(2) };
        let cloud = random_cloud(domain, count, seed);
        let before = quadrature::separation_stats(&cloud, seed).unwrap();
        let pruned = cloud.prune_separated(before.mesh_norm / 2.0);
        let after = quadrature::separation_stats(&pruned, seed).unwrap();
        prop_assert!(after.min_separation >= before.mesh_norm / 2.0);
        prop_assert!(after.mesh_norm <= 2.0 * before.mesh_norm);
        Ok(())
    });
}
