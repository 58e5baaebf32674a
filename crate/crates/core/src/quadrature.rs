//! Quadrature measures supported on scattered point clouds.
//!
//! Weights are the minimal-norm solution of the moment equations
//! `sum_j w_j phi_i(x_j) = int phi_i d mu*` over an orthonormal test basis
//! whose first element is the constant one, so the right side is the first
//! unit vector. The system is solved matrix-free through the Gram operator
//! `A A^T` with conjugate gradients.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::sphere::{self, HarmonicBasis2, SpherePoint};
use crate::torus::{self, wrapped_diff};

/// Largest design matrix (entries) kept in memory between passes.
const CACHE_LIMIT: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "q")]
pub enum Domain {
    Torus(usize),
    Sphere(usize),
}

impl Domain {
    /// Length of a coordinate vector.
    pub fn ambient_len(self) -> usize {
        match self {
            Domain::Torus(q) => q,
            Domain::Sphere(q) => q + 1,
        }
    }

    /// Geodesic distance on the sphere, wrap-around max-norm on the torus.
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Domain::Torus(_) => a
                .iter()
                .zip(b)
                .map(|(x, y)| wrapped_diff(*x, *y).abs())
                .fold(0.0, f64::max),
            Domain::Sphere(_) => sphere::dot(a, b).clamp(-1.0, 1.0).acos(),
        }
    }

    /// A uniformly distributed random point.
    pub fn sample<R: Rng>(self, rng: &mut R) -> Vec<f64> {
        match self {
            Domain::Torus(q) => (0..q)
                .map(|_| rng.random_range(0.0..2.0 * std::f64::consts::PI))
                .collect(),
            Domain::Sphere(q) => sphere::uniform_points(q, 1, rng).remove(0).into_inner(),
        }
    }
}

/// Points on a torus or sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    domain: Domain,
    points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn torus(q: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        for p in &points {
            if p.len() != q {
                return Err(Error::LengthMismatch {
                    what: "torus point",
                    got: p.len(),
                    expected: q,
                });
            }
        }
        let points = points
            .into_iter()
            .map(|p| p.into_iter().map(torus::wrap).collect())
            .collect();
        Ok(Self {
            domain: Domain::Torus(q),
            points,
        })
    }

    pub fn sphere(q: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        let points = points
            .into_iter()
            .map(|p| {
                if p.len() != q + 1 {
                    return Err(Error::LengthMismatch {
                        what: "sphere point",
                        got: p.len(),
                        expected: q + 1,
                    });
                }
                SpherePoint::new(p).map(SpherePoint::into_inner)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            domain: Domain::Sphere(q),
            points,
        })
    }

    pub fn from_sphere_points(q: usize, points: &[SpherePoint]) -> Result<Self> {
        Self::sphere(q, points.iter().map(|p| p.coords().to_vec()).collect())
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Greedy thinning: keeps a point only if it is at least `min_dist` from
    /// every point kept before it.
    pub fn prune_separated(&self, min_dist: f64) -> PointCloud {
        let mut kept: Vec<Vec<f64>> = Vec::new();
        for p in &self.points {
            if kept
                .iter()
                .all(|k| self.domain.distance(p, k) >= min_dist)
            {
                kept.push(p.clone());
            }
        }
        PointCloud {
            domain: self.domain,
            points: kept,
        }
    }
}

/// Mesh norm (fill distance) and minimal separation of a cloud.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationStats {
    pub mesh_norm: f64,
    pub min_separation: f64,
}

/// Exact minimal separation; mesh norm estimated as the largest distance from
/// `50 |cloud|` seeded random probes to the cloud.
pub fn separation_stats(cloud: &PointCloud, seed: u64) -> Result<SeparationStats> {
    if cloud.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "cloud",
            reason: format!("need at least two points, got {}", cloud.len()),
        });
    }
    let d = cloud.domain;
    let pts = &cloud.points;
    let mut eta = f64::INFINITY;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if pts[i] != pts[j] {
                eta = eta.min(d.distance(&pts[i], &pts[j]));
            }
        }
    }
    let mut rng = rng::stream(seed, "mesh-probes");
    let mut delta: f64 = 0.0;
    for _ in 0..50 * pts.len() {
        let probe = d.sample(&mut rng);
        let nearest = pts
            .iter()
            .map(|p| d.distance(&probe, p))
            .fold(f64::INFINITY, f64::min);
        delta = delta.max(nearest);
    }
    Ok(SeparationStats {
        mesh_norm: delta,
        min_separation: if eta.is_finite() { eta } else { 0.0 },
    })
}

/// An orthonormal (for the probability measure) family of test functions
/// whose element 0 is the constant one.
pub trait TestBasis: Sync {
    fn dim(&self) -> usize;
    fn eval_into(&self, x: &[f64], out: &mut [f64]);

    /// Rows for four points, `out[b * dim ..]`.
    fn eval_block4(&self, xs: [&[f64]; 4], out: &mut [f64]) {
        let k = self.dim();
        for (b, x) in xs.iter().enumerate() {
            self.eval_into(x, &mut out[b * k..(b + 1) * k]);
        }
    }
}

impl TestBasis for HarmonicBasis2 {
    fn dim(&self) -> usize {
        HarmonicBasis2::dim(self)
    }

    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        self.eval_all(x, out)
    }

    fn eval_block4(&self, xs: [&[f64]; 4], out: &mut [f64]) {
        HarmonicBasis2::eval_block4(self, xs, out)
    }
}

/// Real trigonometric basis `1, sqrt2 cos(k.x), sqrt2 sin(k.x)` over half of
/// the lattice `0 < |k|_2 < n`.
#[derive(Debug, Clone)]
pub struct TorusBasis {
    freqs: Vec<Vec<i64>>,
}

impl TorusBasis {
    pub fn new(q: usize, n: f64) -> Self {
        let freqs = torus::lattice(q, n)
            .into_iter()
            .filter(|k| k.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0))
            .collect();
        Self { freqs }
    }
}

impl TestBasis for TorusBasis {
    fn dim(&self) -> usize {
        1 + 2 * self.freqs.len()
    }

    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        let s2 = std::f64::consts::SQRT_2;
        out[0] = 1.0;
        for (i, k) in self.freqs.iter().enumerate() {
            let t: f64 = k.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum();
            let (s, c) = t.sin_cos();
            out[1 + 2 * i] = s2 * c;
            out[2 + 2 * i] = s2 * s;
        }
    }
}

/// The test basis of exactness order `order` for a domain: harmonics of
/// degree `< order` on `S^2`, frequencies `|k|_2 < order` on `T^q`.
pub fn test_basis(domain: Domain, order: usize) -> Result<Box<dyn TestBasis>> {
    match domain {
        Domain::Sphere(2) => Ok(Box::new(HarmonicBasis2::new(order))),
        Domain::Sphere(q) => Err(Error::Unsupported(format!(
            "moment-matching weights on S^{q}; only S^2 has an explicit harmonic basis"
        ))),
        Domain::Torus(q) => Ok(Box::new(TorusBasis::new(q, order as f64))),
    }
}

/// Matrix-free access to `A[i][j] = phi_i(x_j)`.
pub struct Design<'a> {
    basis: &'a dyn TestBasis,
    points: &'a [Vec<f64>],
    cache: Option<Vec<f64>>,
}

impl<'a> Design<'a> {
    pub fn new(basis: &'a dyn TestBasis, points: &'a [Vec<f64>]) -> Self {
        let k = basis.dim();
        let mut design = Self {
            basis,
            points,
            cache: None,
        };
        if k * points.len() <= CACHE_LIMIT {
            let mut buf = Vec::with_capacity(k * points.len());
            design.for_each_row(|_, row| buf.extend_from_slice(row));
            design.cache = Some(buf);
        }
        design
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn for_each_row(&self, mut visit: impl FnMut(usize, &[f64])) {
        let k = self.dim();
        match &self.cache {
            Some(buf) => {
                for (j, row) in buf.chunks(k.max(1)).enumerate().take(self.points.len()) {
                    visit(j, row);
                }
            }
            None => {
                let mut rows = vec![0.0; 4 * k];
                let mut chunks = self.points.chunks_exact(4);
                let mut j = 0;
                for c in &mut chunks {
                    self.basis.eval_block4([&c[0], &c[1], &c[2], &c[3]], &mut rows);
                    for row in rows.chunks(k) {
                        visit(j, row);
                        j += 1;
                    }
                }
                for p in chunks.remainder() {
                    self.basis.eval_into(p, &mut rows[..k]);
                    visit(j, &rows[..k]);
                    j += 1;
                }
            }
        }
    }

    /// `A v`, a vector over the basis.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.for_each_row(|j, row| axpy(v[j], row, &mut out));
        out
    }

    /// `A^T u`, a vector over the points.
    pub fn apply_t(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.for_each_row(|j, row| out[j] = dotv(row, u));
        out
    }

    /// `A A^T u` in one pass.
    pub fn gram_apply(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.for_each_row(|_, row| axpy(dotv(row, u), row, &mut out));
        out
    }
}

fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm2(a: &[f64]) -> f64 {
    dotv(a, a).sqrt()
}

/// Outcome of an iterative solve.
#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// True residual norm relative to the right side.
    pub relative_residual: f64,
}

/// Conjugate gradients for a symmetric positive (semi)definite operator,
/// restarted from the current iterate when the recursive residual drifts
/// from the true one.
pub fn conjugate_gradient(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    rhs: &[f64],
    start: Vec<f64>,
    rel_tol: f64,
    max_iter: usize,
) -> CgOutcome {
    let bnorm = norm2(rhs).max(f64::MIN_POSITIVE);
    let mut x = start;
    let mut iterations = 0;
    let true_residual = |x: &[f64]| -> Vec<f64> {
        let ax = apply(x);
        rhs.iter().zip(&ax).map(|(b, a)| b - a).collect()
    };
    let mut r = true_residual(&x);
    for _restart in 0..4 {
        if norm2(&r) <= rel_tol * bnorm || iterations >= max_iter {
            break;
        }
        let mut p = r.clone();
        let mut rr = dotv(&r, &r);
        while iterations < max_iter {
            let ap = apply(&p);
            let pap = dotv(&p, &ap);
            if pap <= 0.0 || !pap.is_finite() {
                break;
            }
            let alpha = rr / pap;
            axpy(alpha, &p, &mut x);
            axpy(-alpha, &ap, &mut r);
            iterations += 1;
            let rr_new = dotv(&r, &r);
            if rr_new.sqrt() <= 0.5 * rel_tol * bnorm {
                break;
            }
            let beta = rr_new / rr;
            rr = rr_new;
            for (pi, ri) in p.iter_mut().zip(&r) {
                *pi = ri + beta * *pi;
            }
        }
        r = true_residual(&x);
    }
    CgOutcome {
        relative_residual: norm2(&r) / bnorm,
        solution: x,
        iterations,
    }
}

const GRAM_TOL: f64 = 1e-10;
const MAX_ITER: usize = 10_000;
const FAILURE_RESIDUAL: f64 = 1e-6;

/// Weights on a cloud together with their exactness certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub cloud: PointCloud,
    pub weights: Vec<f64>,
    pub order: usize,
    /// Largest moment error over the test basis.
    pub moment_residual: f64,
    pub mz_estimate: Option<f64>,
}

impl QuadratureRule {
    /// Wraps given weights, measuring their moment residual at `order`.
    pub fn certify(cloud: PointCloud, weights: Vec<f64>, order: usize) -> Result<Self> {
        if weights.len() != cloud.len() {
            return Err(Error::LengthMismatch {
                what: "weights",
                got: weights.len(),
                expected: cloud.len(),
            });
        }
        let basis = test_basis(cloud.domain, order)?;
        let design = Design::new(basis.as_ref(), &cloud.points);
        let moments = design.apply(&weights);
        let moment_residual = moments
            .iter()
            .enumerate()
            .map(|(i, m)| (m - if i == 0 { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max);
        Ok(Self {
            cloud,
            weights,
            order,
            moment_residual,
            mz_estimate: None,
        })
    }

    /// Tensor Gauss-Legendre rule on `S^2` exact below degree `order`.
    ///
    /// The residual is bounded through the factorization into a rule in
    /// `x3` and an azimuthal trapezoid rule, which avoids the
    /// `O(len * order^2)` cost of [`certify`](Self::certify).
    pub fn product_s2(order: usize) -> Result<Self> {
        let exactness = order.saturating_sub(1);
        let (points, weights) = sphere::product_rule_s2(exactness)?;
        let legendre = sphere::gauss_jacobi(2, exactness / 2 + 1)?;
        let basis = sphere::UltrasphericalBasis::new(2, exactness)?;
        let mut zonal = vec![0.0; exactness + 1];
        for (&z, &w) in legendre.nodes.iter().zip(&legendre.weights) {
            for (acc, p) in zonal.iter_mut().zip(basis.eval_all(z)) {
                *acc += w * p / std::f64::consts::SQRT_2;
            }
        }
        zonal[0] -= 1.0;
        let zonal_residual = zonal.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let az = exactness + 1;
        let azimuthal_residual = (1..order)
            .map(|k| {
                let (c, s) = (0..az).fold((0.0, 0.0), |(c, s), i| {
                    let (sn, cs) = (std::f64::consts::TAU * (k * i) as f64 / az as f64).sin_cos();
                    (c + cs, s + sn)
                });
                c.abs().max(s.abs()) / az as f64
            })
            .fold(0.0f64, f64::max);
        let bound = (2.0 * (2.0 * order as f64 - 1.0)).sqrt();
        Ok(Self {
            cloud: PointCloud::from_sphere_points(2, &points)?,
            weights,
            order,
            moment_residual: zonal_residual.max(bound * azimuthal_residual),
            mz_estimate: None,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.cloud
            .points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .sum()
    }
}

/// Minimal-norm weights reproducing the integrals of the order-`order` test
/// space on the cloud.
pub fn solve_weights(cloud: &PointCloud, order: usize) -> Result<QuadratureRule> {
    let basis = test_basis(cloud.domain, order)?;
    let k = basis.dim();
    let m = cloud.len();
    if m < k {
        return Err(Error::RankDeficient(format!(
            "{m} points cannot carry {k} moment conditions"
        )));
    }
    let design = Design::new(basis.as_ref(), &cloud.points);
    let mut rhs = vec![0.0; k];
    rhs[0] = 1.0;
    let mut start = vec![0.0; k];
    start[0] = 1.0 / m as f64;
    let out = conjugate_gradient(|u| design.gram_apply(u), &rhs, start, GRAM_TOL, MAX_ITER);
    let weights = design.apply_t(&out.solution);
    let moments = design.apply(&weights);
    let moment_residual = moments
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if !(moment_residual <= FAILURE_RESIDUAL) {
        return Err(Error::QuadratureFailure(format!(
            "moment residual {moment_residual:.3e} after {} iterations; the cloud is too sparse for order {order}",
            out.iterations
        )));
    }
    Ok(QuadratureRule {
        cloud: cloud.clone(),
        weights,
        order,
        moment_residual,
        mz_estimate: None,
    })
}

/// Coefficients `c` minimizing `sum_j (sum_i c_i phi_i(x_j) - y_j)^2`.
pub fn discrete_least_squares(
    basis: &dyn TestBasis,
    points: &[Vec<f64>],
    values: &[f64],
) -> Result<Vec<f64>> {
    if values.len() != points.len() {
        return Err(Error::LengthMismatch {
            what: "values",
            got: values.len(),
            expected: points.len(),
        });
    }
    let k = basis.dim();
    if points.len() < k {
        return Err(Error::RankDeficient(format!(
            "{} samples for {k} unknowns",
            points.len()
        )));
    }
    let design = Design::new(basis, points);
    let rhs = design.apply(values);
    let out = conjugate_gradient(
        |u| design.gram_apply(u),
        &rhs,
        vec![0.0; k],
        1e-13,
        MAX_ITER,
    );
    if !(out.relative_residual <= 1e-8) {
        return Err(Error::RankDeficient(format!(
            "normal equations stalled at relative residual {:.3e}",
            out.relative_residual
        )));
    }
    Ok(out.solution)
}

/// Reference rule used for `int |P| d mu*`.
fn reference_rule(domain: Domain, order: usize) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    match domain {
        Domain::Sphere(2) => {
            let (pts, w) = sphere::product_rule_s2(4 * order.max(4))?;
            Ok((pts.into_iter().map(SpherePoint::into_inner).collect(), w))
        }
        Domain::Sphere(q) => Err(Error::Unsupported(format!("reference rule on S^{q}"))),
        Domain::Torus(q) => {
            let size = 8 * order.max(2);
            let pts = torus::grid_points(q, size);
            let w = vec![1.0 / pts.len() as f64; pts.len()];
            Ok((pts, w))
        }
    }
}

/// Estimate of the Marcinkiewicz-Zygmund constant: the largest ratio
/// `sum |w_j| |P(x_j)| / int |P|` over 200 random polynomials of order `n`.
pub fn mz_norm_estimate(rule: &QuadratureRule, n: usize, seed: u64) -> Result<f64> {
    const TRIALS: usize = 200;
    let domain = rule.cloud.domain;
    let basis = test_basis(domain, n)?;
    let k = basis.dim();
    let mut rng = rng::stream(seed, "mz-polynomials");
    let coeffs: Vec<Vec<f64>> = (0..TRIALS)
        .map(|_| {
            let c: Vec<f64> = (0..k)
                .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                .collect();
            let s = norm2(&c);
            c.into_iter().map(|v| v / s).collect()
        })
        .collect();
    let accumulate = |points: &[Vec<f64>], weights: &[f64]| {
        let mut sums = vec![0.0; TRIALS];
        let mut row = vec![0.0; k];
        for (p, w) in points.iter().zip(weights) {
            basis.eval_into(p, &mut row);
            for (s, c) in sums.iter_mut().zip(&coeffs) {
                *s += w.abs() * dotv(&row, c).abs();
            }
        }
        sums
    };
    let (ref_pts, ref_w) = reference_rule(domain, n)?;
    let exact = accumulate(&ref_pts, &ref_w);
    let discrete = accumulate(&rule.cloud.points, &rule.weights);
    Ok(discrete
        .iter()
        .zip(&exact)
        .map(|(d, e)| d / e)
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid_cloud(n: usize) -> PointCloud {
        PointCloud::torus(1, torus::grid_points(1, n)).unwrap()
    }

    #[test]
    fn grid_separation() {
        let n = 64;
        let s = separation_stats(&grid_cloud(n), 3).unwrap();
        assert!((s.min_separation - 2.0 * PI / n as f64).abs() < 1e-12);
        let half = PI / n as f64;
        assert!(s.mesh_norm <= half + 1e-12 && s.mesh_norm >= 0.95 * half);
    }

    #[test]
    fn antipodal_separation() {
        let c = PointCloud::sphere(2, vec![vec![0.0, 0.0, 1.0], vec![0.0, 0.0, -1.0]]).unwrap();
        let s = separation_stats(&c, 1).unwrap();
        assert!((s.min_separation - PI).abs() < 1e-12);
        let single = PointCloud::sphere(2, vec![vec![0.0, 0.0, 1.0]]).unwrap();
        assert!(separation_stats(&single, 1).is_err());
    }

    #[test]
    fn grid_weights_are_uniform() {
        let n = 32;
        let rule = solve_weights(&grid_cloud(n), 16).unwrap();
        for w in &rule.weights {
            assert!((w - 1.0 / n as f64).abs() < 1e-12);
        }
        let est = mz_norm_estimate(&rule, 8, 5).unwrap();
        assert!((1.0..=1.2).contains(&est), "{est}");
        assert_eq!(est, mz_norm_estimate(&rule, 8, 5).unwrap());
    }

    #[test]
    fn too_few_sphere_points() {
        let mut r = rng::stream(1, "t");
        let pts = sphere::uniform_points(2, 200, &mut r);
        let c = PointCloud::from_sphere_points(2, &pts).unwrap();
        assert!(matches!(solve_weights(&c, 16), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn sphere_rule_small() {
        let mut r = rng::stream(2, "t");
        let pts = sphere::uniform_points(2, 600, &mut r);
        let c = PointCloud::from_sphere_points(2, &pts).unwrap();
        let rule = solve_weights(&c, 8).unwrap();
        assert!(rule.moment_residual < 1e-9);
        let total: f64 = rule.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        // E[x3^2] = 1/3
        let m2 = rule.integrate(|x| x[2] * x[2]);
        assert!((m2 - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn negative_weights_raise_mz_constant() {
        let cloud = grid_cloud(8);
        let mut weights = vec![0.125; 8];
        weights[0] = 0.375;
        weights[4] = -0.125;
        let rule = QuadratureRule {
            cloud,
            weights,
            order: 2,
            moment_residual: 0.0,
            mz_estimate: None,
        };
        assert!(mz_norm_estimate(&rule, 2, 9).unwrap() > 1.0);
    }

    #[test]
    fn least_squares_recovers_polynomial() {
        let basis = TorusBasis::new(1, 4.0);
        let pts = torus::grid_points(1, 40);
        let vals: Vec<f64> = pts.iter().map(|x| 0.5 + (2.0 * x[0]).sin()).collect();
        let c = discrete_least_squares(&basis, &pts, &vals).unwrap();
        assert!((c[0] - 0.5).abs() < 1e-12);
        let s2 = std::f64::consts::SQRT_2;
        // freq 2 sine slot
        assert!((c[4] - 1.0 / s2).abs() < 1e-12);
    }
}
