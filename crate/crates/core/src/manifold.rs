//! Kernel regression and density estimation on an unknown submanifold of
//! `S^Q`, using only the manifold dimension `q`.
//!
//! The estimator is `F_n(x) = (1/M) sum_j y_j Phi_{n,q}(x . x_j)`: the
//! `q`-dimensional localized kernel applied to ambient inner products.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::FilterSpec;
use crate::rng;
use crate::sphere::{dot, SphericalKernel};

/// How [`ManifoldEstimator::evaluate`] normalizes the kernel sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `(1/M) sum_j y_j Phi(x . x_j)`.
    #[default]
    Raw,
    /// `sum_j y_j Phi(x . x_j) / sum_j Phi(x . x_j)`.
    Ratio,
}

/// Labeled points on `S^Q` believed to lie on a `q`-dimensional manifold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbientLabeledCloud {
    pub ambient_dim: usize,
    pub manifold_dim: usize,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

impl AmbientLabeledCloud {
    pub fn new(
        ambient_dim: usize,
        manifold_dim: usize,
        points: Vec<Vec<f64>>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if manifold_dim == 0 || manifold_dim > ambient_dim {
            return Err(Error::InvalidParameter {
                name: "manifold_dim",
                reason: format!("need 1 <= q <= Q, got q={manifold_dim}, Q={ambient_dim}"),
            });
        }
        if values.len() != points.len() {
            return Err(Error::LengthMismatch {
                what: "values",
                got: values.len(),
                expected: points.len(),
            });
        }
        for p in &points {
            if p.len() != ambient_dim + 1 {
                return Err(Error::LengthMismatch {
                    what: "ambient point",
                    got: p.len(),
                    expected: ambient_dim + 1,
                });
            }
            let norm = dot(p, p).sqrt();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter {
                    name: "points",
                    reason: format!("point of norm {norm} is not on the unit sphere"),
                });
            }
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: format!("labels must be bounded, found {v}"),
            });
        }
        Ok(Self {
            ambient_dim,
            manifold_dim,
            points,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `F_n` built on a labeled cloud.
#[derive(Debug, Clone)]
pub struct ManifoldEstimator {
    cloud: AmbientLabeledCloud,
    kernel: SphericalKernel,
    normalization: Normalization,
}

impl ManifoldEstimator {
    pub fn new(
        cloud: AmbientLabeledCloud,
        degree: f64,
        filter: &FilterSpec,
        normalization: Normalization,
    ) -> Result<Self> {
        if cloud.is_empty() {
            return Err(Error::EmptyData);
        }
        let kernel = SphericalKernel::new(cloud.manifold_dim, degree, filter)?;
        Ok(Self {
            cloud,
            kernel,
            normalization,
        })
    }

    pub fn cloud(&self) -> &AmbientLabeledCloud {
        &self.cloud
    }

    pub fn kernel(&self) -> &SphericalKernel {
        &self.kernel
    }

    fn check_probe(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.cloud.ambient_dim + 1 {
            return Err(Error::LengthMismatch {
                what: "probe",
                got: x.len(),
                expected: self.cloud.ambient_dim + 1,
            });
        }
        Ok(())
    }

    /// Kernel sums `(sum_j y_j Phi(x . x_j), sum_j Phi(x . x_j))` at four
    /// probes, sharing one pass over the data.
    fn sums4(&self, xs: [&[f64]; 4]) -> [(f64, f64); 4] {
        let mut out = [(0.0, 0.0); 4];
        for (p, y) in self.cloud.points.iter().zip(&self.cloud.values) {
            let k = self.kernel.eval4_clamped(xs.map(|x| dot(x, p)));
            for i in 0..4 {
                out[i].0 += y * k[i];
                out[i].1 += k[i];
            }
        }
        out
    }

    fn finish(&self, (num, den): (f64, f64)) -> Result<f64> {
        match self.normalization {
            Normalization::Raw => Ok(num / self.cloud.len() as f64),
            Normalization::Ratio => {
                if den.abs() < 1e-10 {
                    Err(Error::OutOfSupport(den))
                } else {
                    Ok(num / den)
                }
            }
        }
    }

    /// Value of the estimator at an ambient unit vector.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_probe(x)?;
        self.finish(self.sums4([x, x, x, x])[0])
    }

    /// Estimator at many probes; also returns the raw density estimate
    /// `(1/M) sum_j Phi(x . x_j)` at each probe.
    pub fn evaluate_with_density(&self, probes: &[Vec<f64>]) -> Result<Vec<(Result<f64>, f64)>> {
        for x in probes {
            self.check_probe(x)?;
        }
        let m = self.cloud.len() as f64;
        let blocks: Vec<Vec<(Result<f64>, f64)>> = probes
            .par_chunks(4)
            .map(|chunk| {
                let pick = |i: usize| chunk[i.min(chunk.len() - 1)].as_slice();
                let sums = self.sums4([pick(0), pick(1), pick(2), pick(3)]);
                sums[..chunk.len()]
                    .iter()
                    .map(|&s| (self.finish(s), s.1 / m))
                    .collect()
            })
            .collect();
        Ok(blocks.into_iter().flatten().collect())
    }

    pub fn evaluate_many(&self, probes: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.evaluate_with_density(probes)?
            .into_iter()
            .map(|(v, _)| v)
            .collect()
    }
}

/// A great circle of `S^2` spanned by two orthonormal vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreatCircle {
    pub u: [f64; 3],
    pub v: [f64; 3],
}

impl GreatCircle {
    /// Circle through `(1, 0, 0)`, tilted out of the coordinate planes.
    pub fn tilted() -> Self {
        let s = 0.5f64.sqrt();
        Self {
            u: [1.0, 0.0, 0.0],
            v: [0.0, s, s],
        }
    }

    pub fn point(&self, theta: f64) -> Vec<f64> {
        let (s, c) = theta.sin_cos();
        (0..3).map(|i| c * self.u[i] + s * self.v[i]).collect()
    }

    pub fn uniform<R: Rng>(&self, count: usize, rng: &mut R) -> Vec<Vec<f64>> {
        (0..count)
            .map(|_| self.point(rng.random_range(0.0..std::f64::consts::TAU)))
            .collect()
    }

    /// `count` equally spaced points.
    pub fn probes(&self, count: usize) -> Vec<Vec<f64>> {
        (0..count)
            .map(|i| self.point(std::f64::consts::TAU * i as f64 / count as f64))
            .collect()
    }
}

/// Sample size `ceil(c n^{q + 2 gamma} ln(n / delta))`.
pub fn sample_schedule(n: f64, q: usize, gamma: f64, constant: f64, delta: f64) -> usize {
    (constant * n.powf(q as f64 + 2.0 * gamma) * (n / delta).ln()).ceil() as usize
}

/// `x -> (1 - r^2) / (1 - 2 r x_1 + r^2)`, analytic near the sphere for
/// `|r| < 1`. On the great circle through `e_1` its Fourier coefficients
/// are `r^|l|`, so the filtered bias decays geometrically in `n`.
pub fn poisson_target(r: f64) -> impl Fn(&[f64]) -> f64 + Sync + Copy {
    move |x: &[f64]| (1.0 - r * r) / (1.0 - 2.0 * r * x[0] + r * r)
}

/// Parameters of [`rate_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RateConfig {
    pub degrees: Vec<f64>,
    pub gamma: f64,
    pub constant: f64,
    pub delta: f64,
    pub probes: usize,
    pub noise_sd: f64,
    pub filter: FilterSpec,
}

impl Default for RateConfig {
    fn default() -> Self {
        Self {
            degrees: vec![8.0, 16.0, 32.0],
            gamma: 1.25,
            constant: 4.0,
            delta: 0.1,
            probes: 128,
            noise_sd: 0.0,
            filter: FilterSpec::quintic(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub degree: f64,
    pub samples: usize,
    pub sup_error: f64,
    /// Largest `|F_n - 1|` of the density estimate from the same points.
    pub density_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub seed: u64,
    pub rows: Vec<RateRow>,
    /// Least-squares slope of `log sup_error` against `log n`.
    pub slope: f64,
}

/// Convergence of `F_n` to `target` for data uniform on a great circle of
/// `S^2`, with the sample size growing per [`sample_schedule`].
pub fn rate_experiment(
    target: impl Fn(&[f64]) -> f64 + Sync,
    config: &RateConfig,
    seed: u64,
) -> Result<RateReport> {
    let circle = GreatCircle::tilted();
    let probes = circle.probes(config.probes);
    let truth: Vec<f64> = probes.iter().map(|x| target(x)).collect();
    let mut rows = Vec::new();
    for &n in &config.degrees {
        let m = sample_schedule(n, 1, config.gamma, config.constant, config.delta);
        let mut r = rng::stream(seed, &format!("circle-n{n}"));
        let points = circle.uniform(m, &mut r);
        let values: Vec<f64> = points
            .iter()
            .map(|x| {
                let noise = if config.noise_sd > 0.0 {
                    config.noise_sd * r.sample::<f64, _>(StandardNormal)
                } else {
                    0.0
                };
                target(x) + noise
            })
            .collect();
        let cloud = AmbientLabeledCloud::new(2, 1, points, values)?;
        let est = ManifoldEstimator::new(cloud, n, &config.filter, Normalization::Raw)?;
        let evaluated = est.evaluate_with_density(&probes)?;
        let mut sup_error: f64 = 0.0;
        let mut density_error: f64 = 0.0;
        for ((value, density), t) in evaluated.into_iter().zip(&truth) {
            sup_error = sup_error.max((value? - t).abs());
            density_error = density_error.max((density - 1.0).abs());
        }
        rows.push(RateRow {
            degree: n,
            samples: m,
            sup_error,
            density_error,
        });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.sup_error > 0.0)
        .map(|r| (r.degree.ln(), r.sup_error.ln()))
        .collect();
    let slope = if pts.len() >= 2 {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    } else {
        f64::NAN
    };
    Ok(RateReport { seed, rows, slope })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_kernel_is_fejer_like() {
        // on S^1 the kernel is 1 + 2 sum h(l/n) cos(l theta)
        let h = FilterSpec::quintic();
        let k = SphericalKernel::new(1, 8.0, &h).unwrap();
        for theta in [0.0, 0.3, 1.7, 3.0] {
            let direct: f64 = 1.0
                + 2.0
                    * (1..8)
                        .map(|l| h.eval(l as f64 / 8.0) * (l as f64 * theta).cos())
                        .sum::<f64>();
            assert!((k.eval_clamped(f64::cos(theta)) - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn empty_and_bad_clouds() {
        let c = AmbientLabeledCloud::new(2, 1, vec![], vec![]).unwrap();
        assert!(matches!(
            ManifoldEstimator::new(c, 8.0, &FilterSpec::quintic(), Normalization::Raw),
            Err(Error::EmptyData)
        ));
        assert!(AmbientLabeledCloud::new(2, 3, vec![], vec![]).is_err());
        assert!(AmbientLabeledCloud::new(2, 1, vec![vec![1.0, 1.0, 0.0]], vec![0.0]).is_err());
    }

    #[test]
    fn ratio_flags_vanishing_denominator() {
        let s = 0.5f64.sqrt();
        let normal = vec![0.0, -s, s];
        let cloud = AmbientLabeledCloud::new(2, 1, vec![normal.clone()], vec![3.0]).unwrap();
        // sharp kernel of degree 2 on S^1 is 1 + 2t
        let est = ManifoldEstimator::new(cloud, 2.0, &FilterSpec::sharp(), Normalization::Ratio).unwrap();
        assert!((est.evaluate(&normal).unwrap() - 3.0).abs() < 1e-12);
        let c = 0.75f64.sqrt();
        let probe: Vec<f64> = (0..3).map(|i| -0.5 * normal[i] + c * [1.0, 0.0, 0.0][i]).collect();
        assert!(matches!(est.evaluate(&probe), Err(Error::OutOfSupport(_))));
    }
}
