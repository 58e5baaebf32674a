mod common;

use locapprox::filters::{FilterKind, FilterSpec};
use locapprox::masc::{cluster, support_estimate, threshold_set, MetricCloud, PsiForm, PsiKernel};
use locapprox::rng;
use proptest::prelude::*;
use rand::Rng;

fn filter() -> FilterSpec {
    FilterSpec::new(FilterKind::Quintic)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Torus,
    Euclidean,
    Chordal,
}

fn random_cloud(count: usize, dim: usize, seed: u64, kind: Kind) -> MetricCloud {
    let mut r = rng::stream(seed, "prop-masc-cloud");
    let points = (0..count)
        .map(|_| (0..dim).map(|_| r.random_range(-3.0..3.0)).collect())
        .collect();
    match kind {
        Kind::Torus => MetricCloud::torus(points),
        Kind::Euclidean => MetricCloud::euclidean(points),
        Kind::Chordal => MetricCloud::chordal(points),
    }
    .unwrap()
}

fn metric() -> impl Strategy<Value = Kind> {
    prop_oneof![Just(Kind::Torus), Just(Kind::Euclidean), Just(Kind::Chordal)]
}

#[test]
fn psi_is_symmetric_in_its_arguments() {
    common::check(8, (any::<u64>(), metric(), 4usize..200), |(seed, metric, n)| {
        let dim = if metric == Kind::Chordal { 3 } else { 2 };
        let cloud = random_cloud(40, dim, seed, metric);
        for form in [PsiForm::SquaredReal, PsiForm::ModulusSquared] {
            let psi = PsiKernel::new(n, &filter(), form).unwrap();
            for i in 0..cloud.len() {
                for j in 0..i {
                    let (a, b) = (&cloud.points()[i], &cloud.points()[j]);
                    let (dab, dba) = (cloud.distance(a, b), cloud.distance(b, a));
                    prop_assert!((0.0..=std::f64::consts::PI + 1e-12).contains(&dab));
                    prop_assert_eq!(psi.eval(dab), psi.eval(dba));
                    prop_assert!(psi.eval(dab) >= -1e-12);
                }
            }
        }
        Ok(())
    });
}

#[test]
fn raising_the_threshold_shrinks_the_kept_set() {
    common::check(6, (any::<u64>(), 0.001f64..1.0, 0.001f64..1.0), |(seed, a, b)| {
        let (low, high) = if a < b { (a, b) } else { (b, a) };
        let cloud = random_cloud(300, 2, seed, Kind::Torus);
        let psi = PsiKernel::new(32, &filter(), PsiForm::SquaredReal).unwrap();
        let est = support_estimate(&cloud, &psi, &filter(), &[]).unwrap();
        let kept_low = threshold_set(&est, low).unwrap();
        let kept_high = threshold_set(&est, high).unwrap();
        prop_assert!(kept_high.iter().all(|i| kept_low.binary_search(i).is_ok()));
        Ok(())
    });
}

#[test]
fn clusters_are_separated_by_eta() {
    common::check(10, (any::<u64>(), metric(), 0.02f64..0.6), |(seed, metric, eta)| {
        let dim = if metric == Kind::Chordal { 3 } else { 2 };
        let cloud = random_cloud(250, dim, seed, metric);
        let kept: Vec<usize> = (0..cloud.len()).filter(|i| i % 3 != 0).collect();
        let partition = cluster(&cloud, &kept, eta).unwrap();
        let total: usize = partition.clusters.iter().map(Vec::len).sum();
        prop_assert_eq!(total, kept.len());
        if partition.clusters.len() > 1 {
            prop_assert!(partition.min_gap(&cloud) >= eta);
        }
        Ok(())
    });
}
