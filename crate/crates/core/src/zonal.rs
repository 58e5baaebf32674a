//! Shallow networks `x -> sum_k a_k |x . c_k|^(2 gamma + 1)` on `S^q`,
//! synthesized from data by inverting the spectral action of the kernel.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::FilterSpec;
use crate::quadrature::{Domain, PointCloud, QuadratureRule};
use crate::rng;
use crate::sphere::{gauss_jacobi_general, volume_ratio, HarmonicBasis2, SphericalKernel, UltrasphericalBasis};

/// Rules with a larger moment residual are rejected by [`synthesize`].
pub const RULE_TOLERANCE: f64 = 1e-6;
const MASK_TOLERANCE: f64 = 1e-10;
const VANISHING: f64 = 1e-14;
const MAX_NODES: usize = 1024;

/// Spectral coefficients `B_l` of `t -> |t|^(2 gamma + 1)`:
/// `|x.y|^e = sum_l B_l sum_k Y_{l,k}(x) Y_{l,k}(y)` for harmonics
/// orthonormal under the uniform probability measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZonalMask {
    gamma: f64,
    q: usize,
    coeffs: Vec<f64>,
}

impl ZonalMask {
    /// Coefficients for degrees `0..=max_degree`.
    pub fn build(gamma: f64, q: usize, max_degree: usize) -> Result<Self> {
        if !(gamma > -0.5) || !gamma.is_finite() {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("must exceed -1/2, got {gamma}"),
            });
        }
        let exponent = 2.0 * gamma + 1.0;
        if (exponent / 2.0).fract() == 0.0 {
            return Err(Error::EvenExponent(exponent));
        }
        let basis = UltrasphericalBasis::new(q, max_degree)?;
        let lambda = q as f64 / 2.0 - 1.0;
        let mut nodes = max_degree / 2 + 16;
        let mut coeffs = half_line_moments(&basis, lambda, exponent, nodes)?;
        loop {
            let refined_nodes = 2 * nodes;
            if refined_nodes > MAX_NODES {
                break;
            }
            let refined = half_line_moments(&basis, lambda, exponent, refined_nodes)?;
            let settled = coeffs
                .iter()
                .zip(&refined)
                .all(|(a, b)| (a - b).abs() <= MASK_TOLERANCE * b.abs().max(1e-300) + 1e-16);
            coeffs = refined;
            nodes = refined_nodes;
            if settled {
                break;
            }
        }
        let scale = 2.0 / volume_ratio(q);
        for (l, c) in coeffs.iter_mut().enumerate() {
            *c = if l % 2 == 0 { *c * scale } else { 0.0 };
        }
        for (l, &c) in coeffs.iter().enumerate().step_by(2) {
            if c.abs() < VANISHING {
                return Err(Error::VanishingMask { degree: l, value: c });
            }
        }
        Ok(Self { gamma, q, coeffs })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// The power `2 gamma + 1` applied to `|x . c|`.
    pub fn exponent(&self) -> f64 {
        2.0 * self.gamma + 1.0
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Maps harmonic coefficients of an `S^2` polynomial (in
    /// [`HarmonicBasis2`] order) to those of its kernel pre-image. Odd
    /// degrees are annihilated by the kernel and map to zero.
    pub fn invert_harmonic_coeffs(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        if self.q != 2 {
            return Err(Error::Unsupported(format!(
                "harmonic coefficients are only indexed on S^2, mask is for S^{}",
                self.q
            )));
        }
        coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let l = HarmonicBasis2::degree_of(idx);
                if l > self.max_degree() {
                    return Err(Error::DegreeOverflow {
                        degree: l,
                        max: self.max_degree(),
                    });
                }
                Ok(if l % 2 == 0 { c / self.coeffs[l] } else { 0.0 })
            })
            .collect()
    }

    /// Zonal kernel `sum_{l even} h(l/n) / B_l * (addition kernel)_l`,
    /// which composes the filtered projection with the inverse transform.
    pub fn inverse_kernel(&self, n: f64, filter: &FilterSpec) -> Result<SphericalKernel> {
        let needed = n.ceil() as usize;
        if needed > self.max_degree() + 1 {
            return Err(Error::DegreeOverflow {
                degree: needed - 1,
                max: self.max_degree(),
            });
        }
        SphericalKernel::with_weights(self.q, n, filter, |l| {
            if l % 2 == 0 {
                filter.eval(l as f64 / n) / self.coeffs[l]
            } else {
                0.0
            }
        })
    }
}

/// `int_0^1 t^e p_l(t) / p_l(1) (1 - t^2)^lambda dt` for every degree,
/// by Gauss-Jacobi after `t = (1 + s) / 2`.
fn half_line_moments(
    basis: &UltrasphericalBasis,
    lambda: f64,
    exponent: f64,
    nodes: usize,
) -> Result<Vec<f64>> {
    let rule = gauss_jacobi_general(nodes, lambda, exponent)?;
    let factor = 2f64.powf(-exponent - lambda - 1.0);
    let at_one = basis.values_at_one();
    let mut out = vec![0.0; basis.max_degree() + 1];
    for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
        let t = 0.5 * (1.0 + s);
        let smooth = w * factor * (1.0 + t).powf(lambda);
        for (o, (p, p1)) in out.iter_mut().zip(basis.eval_all(t).iter().zip(at_one)) {
            *o += smooth * p / p1;
        }
    }
    Ok(out)
}

/// `x -> sum_k a_k |x . c_k|^exponent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZonalNetwork {
    pub gamma: f64,
    pub centers: Vec<Vec<f64>>,
    pub coeffs: Vec<f64>,
}

impl ZonalNetwork {
    pub fn exponent(&self) -> f64 {
        2.0 * self.gamma + 1.0
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let e = self.exponent();
        self.centers
            .iter()
            .zip(&self.coeffs)
            .map(|(c, a)| a * dot(x, c).abs().powf(e))
            .sum()
    }

    pub fn eval_many(&self, probes: &[Vec<f64>]) -> Vec<f64> {
        probes.par_iter().map(|x| self.eval(x)).collect()
    }

    /// `sum_k |a_k|`.
    pub fn coefficient_mass(&self) -> f64 {
        self.coeffs.iter().map(|a| a.abs()).sum()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sphere_dim(rule: &QuadratureRule, which: &str) -> Result<usize> {
    match rule.cloud.domain() {
        Domain::Sphere(q) => {
            if !(rule.moment_residual <= RULE_TOLERANCE) {
                return Err(Error::QuadratureFailure(format!(
                    "{which} rule has moment residual {:.3e} at order {}",
                    rule.moment_residual, rule.order
                )));
            }
            Ok(q)
        }
        Domain::Torus(_) => Err(Error::Unsupported(format!(
            "{which} rule must live on a sphere"
        ))),
    }
}

/// Network whose centers are the nodes of `discretizing` and whose
/// coefficients are `w_k D(sigma_n f)(c_k)`, where `sigma_n f` is the
/// filtered projection of `values` computed with `sampling`.
pub fn synthesize(
    sampling: &QuadratureRule,
    values: &[f64],
    discretizing: &QuadratureRule,
    n: f64,
    gamma: f64,
    filter: &FilterSpec,
) -> Result<ZonalNetwork> {
    let q = sphere_dim(sampling, "sampling")?;
    if sphere_dim(discretizing, "discretizing")? != q {
        return Err(Error::InvalidParameter {
            name: "discretizing",
            reason: "rules live on spheres of different dimension".into(),
        });
    }
    if values.len() != sampling.len() {
        return Err(Error::LengthMismatch {
            what: "values",
            got: values.len(),
            expected: sampling.len(),
        });
    }
    let mask = ZonalMask::build(gamma, q, (n.ceil() as usize).max(1))?;
    let kernel = mask.inverse_kernel(n, filter)?;
    let data: Vec<(&[f64], f64)> = sampling
        .cloud
        .points()
        .iter()
        .zip(sampling.weights.iter().zip(values))
        .map(|(p, (w, y))| (p.as_slice(), w * y))
        .collect();
    let coeffs = discretizing
        .cloud
        .points()
        .par_iter()
        .zip(&discretizing.weights)
        .map(|(center, w)| w * kernel_sum(&kernel, &data, center))
        .collect();
    Ok(ZonalNetwork {
        gamma,
        centers: discretizing.cloud.points().to_vec(),
        coeffs,
    })
}

/// `sum_j c_j K(x . y_j)` in blocks of four.
fn kernel_sum(kernel: &SphericalKernel, data: &[(&[f64], f64)], x: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut chunks = data.chunks_exact(4);
    for block in &mut chunks {
        let t = [0, 1, 2, 3].map(|i| dot(x, block[i].0));
        let k = kernel.eval4_clamped(t);
        total += (0..4).map(|i| k[i] * block[i].1).sum::<f64>();
    }
    for (y, c) in chunks.remainder() {
        total += c * kernel.eval_clamped(dot(x, y));
    }
    total
}

/// `int_{S^2} |x . y|^exponent g(y) dmu(y)` for the uniform probability
/// measure, split at the equator of `x` so that polynomial `g` of degree
/// below `2 * nodes` is integrated exactly.
pub fn kernel_integral_s2(exponent: f64, g: impl Fn(&[f64]) -> f64, x: &[f64], nodes: usize) -> Result<f64> {
    let rule = gauss_jacobi_general(nodes, 0.0, exponent)?;
    let (e1, e2) = orthonormal_complement(x);
    let azimuths = 2 * nodes + 1;
    let factor = 2f64.powf(-exponent - 1.0);
    let mut total = 0.0;
    for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
        let r = 0.5 * (1.0 + s);
        for t in [r, -r] {
            let rho = (1.0 - t * t).max(0.0).sqrt();
            let mut ring = 0.0;
            for i in 0..azimuths {
                let phi = std::f64::consts::TAU * i as f64 / azimuths as f64;
                let (sn, cs) = phi.sin_cos();
                let y: Vec<f64> = (0..3)
                    .map(|d| rho * (cs * e1[d] + sn * e2[d]) + t * x[d])
                    .collect();
                ring += g(&y);
            }
            total += w * factor * ring / azimuths as f64;
        }
    }
    Ok(0.5 * total)
}

fn orthonormal_complement(x: &[f64]) -> ([f64; 3], [f64; 3]) {
    let pivot = if x[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = dot(&pivot, x);
    let mut e1 = [0.0; 3];
    for i in 0..3 {
        e1[i] = pivot[i] - d * x[i];
    }
    let norm = dot(&e1, &e1).sqrt();
    e1.iter_mut().for_each(|v| *v /= norm);
    let e2 = [
        x[1] * e1[2] - x[2] * e1[1],
        x[2] * e1[0] - x[0] * e1[2],
        x[0] * e1[1] - x[1] * e1[0],
    ];
    (e1, e2)
}

/// A uniformly random rotation of `R^3` as a row-major matrix.
pub fn random_rotation<R: Rng>(rng: &mut R) -> [[f64; 3]; 3] {
    let v: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    let [a, b, c, d] = v.map(|c| c / norm);
    [
        [a * a + b * b - c * c - d * d, 2.0 * (b * c - a * d), 2.0 * (b * d + a * c)],
        [2.0 * (b * c + a * d), a * a - b * b + c * c - d * d, 2.0 * (c * d - a * b)],
        [2.0 * (b * d - a * c), 2.0 * (c * d + a * b), a * a - b * b - c * c + d * d],
    ]
}

pub fn rotate(m: &[[f64; 3]; 3], x: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, x)).collect()
}

/// Rotated copy of a rule on `S^2`. Rotations preserve polynomial spaces,
/// so the recorded residual carries over.
pub fn rotate_rule(rule: &QuadratureRule, m: &[[f64; 3]; 3]) -> Result<QuadratureRule> {
    let points = rule.cloud.points().iter().map(|p| rotate(m, p)).collect();
    Ok(QuadratureRule {
        cloud: PointCloud::sphere(2, points)?,
        weights: rule.weights.clone(),
        order: rule.order,
        moment_residual: rule.moment_residual,
        mz_estimate: rule.mz_estimate,
    })
}

/// Parameters of [`rate_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ZonalRateConfig {
    pub gamma: f64,
    pub degrees: Vec<f64>,
    pub probes: usize,
    pub filter: FilterSpec,
}

impl Default for ZonalRateConfig {
    fn default() -> Self {
        Self {
            gamma: 0.0,
            degrees: vec![8.0, 16.0, 32.0],
            probes: 200,
            filter: FilterSpec::quintic(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZonalRateRow {
    pub degree: f64,
    pub centers: usize,
    pub sup_error: f64,
    pub coefficient_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZonalRateReport {
    pub seed: u64,
    pub gamma: f64,
    pub rows: Vec<ZonalRateRow>,
    /// `sup_error[i + 1] / sup_error[i]`.
    pub ratios: Vec<f64>,
}

/// Sup error of networks for `target` at each degree `n`, with sampling
/// rules exact to degree `2n` and discretizing rules exact to degree `4n`.
/// Both families are product rules in a random frame shared across `n`.
pub fn rate_experiment(
    target: impl Fn(&[f64]) -> f64 + Sync,
    config: &ZonalRateConfig,
    seed: u64,
) -> Result<ZonalRateReport> {
    let mut probe_rng = rng::stream(seed, "zonal-probes");
    let probes: Vec<Vec<f64>> = crate::sphere::uniform_points(2, config.probes, &mut probe_rng)
        .into_iter()
        .map(|p| p.into_inner())
        .collect();
    let truth: Vec<f64> = probes.iter().map(|x| target(x)).collect();
    let mut r = rng::stream(seed, "zonal-rotations");
    let sampling_frame = random_rotation(&mut r);
    let discretizing_frame = random_rotation(&mut r);
    let mut rows = Vec::new();
    for &n in &config.degrees {
        let degree = n.ceil() as usize;
        let sampling = rotate_rule(&QuadratureRule::product_s2(2 * degree + 1)?, &sampling_frame)?;
        let discretizing = rotate_rule(&QuadratureRule::product_s2(4 * degree + 1)?, &discretizing_frame)?;
        let values: Vec<f64> = sampling.cloud.points().iter().map(|x| target(x)).collect();
        let net = synthesize(&sampling, &values, &discretizing, n, config.gamma, &config.filter)?;
        let sup_error = net
            .eval_many(&probes)
            .iter()
            .zip(&truth)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        rows.push(ZonalRateRow {
            degree: n,
            centers: net.len(),
            sup_error,
            coefficient_mass: net.coefficient_mass(),
        });
    }
    let ratios = rows.windows(2).map(|w| w[1].sup_error / w[0].sup_error).collect();
    Ok(ZonalRateReport {
        seed,
        gamma: config.gamma,
        rows,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_coefficient_is_mean_of_abs() {
        let mask = ZonalMask::build(0.0, 2, 8).unwrap();
        assert!((mask.coeffs()[0] - 0.5).abs() < 1e-14);
        // |t| projected on P_2: (5/2) int |t| P_2 = 5/8, over the degree-2 dimension 5.
        assert!((mask.coeffs()[2] - 0.125).abs() < 1e-14);
    }

    #[test]
    fn odd_degrees_vanish_and_even_alternate() {
        let mask = ZonalMask::build(0.0, 2, 16).unwrap();
        for (l, c) in mask.coeffs().iter().enumerate() {
            if l % 2 == 1 {
                assert_eq!(*c, 0.0);
            }
        }
        for l in (2..=16).step_by(2) {
            assert!(mask.coeffs()[l] * mask.coeffs()[l - 2] < 0.0 || l == 2);
        }
    }

    #[test]
    fn even_exponent_rejected() {
        assert!(matches!(ZonalMask::build(0.5, 2, 4), Err(Error::EvenExponent(_))));
        assert!(matches!(ZonalMask::build(1.5, 2, 4), Err(Error::EvenExponent(_))));
        assert!(ZonalMask::build(-0.6, 2, 4).is_err());
    }

    #[test]
    fn half_integer_dimension_converges() {
        let mask = ZonalMask::build(0.25, 3, 12).unwrap();
        // Constant term: mean of |t|^1.5 under (1-t^2)^(1/2) / (pi/2).
        let direct = {
            let rule = gauss_jacobi_general(400, 0.5, 0.5).unwrap();
            rule.integrate(|t| t.abs().powf(1.5)) / (std::f64::consts::PI / 2.0)
        };
        assert!((mask.coeffs()[0] - direct).abs() < 1e-5);
    }

    #[test]
    fn oracle_integrates_abs_exactly() {
        let x = [0.6, 0.0, 0.8];
        let v = kernel_integral_s2(1.0, |_| 1.0, &x, 4).unwrap();
        assert!((v - 0.5).abs() < 1e-14);
        let v = kernel_integral_s2(1.0, |y| y[2] * y[2], &x, 4).unwrap();
        // y3^2 = 1/3 + (a degree-2 harmonic), each scaled by its coefficient.
        let mask = ZonalMask::build(0.0, 2, 2).unwrap();
        let expect = mask.coeffs()[0] / 3.0 + mask.coeffs()[2] * (x[2] * x[2] - 1.0 / 3.0);
        assert!((v - expect).abs() < 1e-14);
    }

    fn even_poly(x: &[f64]) -> f64 {
        0.3 + x[0] * x[1] - 0.7 * x[2] * x[2] + 0.4 * x[0].powi(2) * x[2].powi(2) - 0.2 * x[1].powi(4)
    }

    fn probes(seed: u64, count: usize) -> Vec<Vec<f64>> {
        crate::sphere::uniform_points(2, count, &mut rng::stream(seed, "zonal-test-probes"))
            .into_iter()
            .map(|p| p.into_inner())
            .collect()
    }

    #[test]
    fn even_polynomial_reproduced_with_fine_discretization() {
        let sampling = QuadratureRule::product_s2(17).unwrap();
        let discretizing = QuadratureRule::product_s2(401).unwrap();
        let values: Vec<f64> = sampling.cloud.points().iter().map(|x| even_poly(x)).collect();
        let net = synthesize(&sampling, &values, &discretizing, 8.0, 0.0, &FilterSpec::quintic()).unwrap();
        assert_eq!(net.len(), discretizing.len());
        let err = probes(1, 50)
            .iter()
            .map(|x| (net.eval(x) - even_poly(x)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-5, "{err}");
    }

    #[test]
    fn matches_double_sum() {
        let sampling = QuadratureRule::product_s2(9).unwrap();
        let discretizing = QuadratureRule::product_s2(7).unwrap();
        assert!(discretizing.len() <= 60);
        let f = |x: &[f64]| (x[0] + 2.0 * x[2]).exp();
        let values: Vec<f64> = sampling.cloud.points().iter().map(|x| f(x)).collect();
        let filter = FilterSpec::quintic();
        let net = synthesize(&sampling, &values, &discretizing, 4.0, 0.0, &filter).unwrap();
        let mask = ZonalMask::build(0.0, 2, 4).unwrap();
        let ratio = volume_ratio(2);
        let basis = UltrasphericalBasis::new(2, 4).unwrap();
        let kernel = |t: f64| -> f64 {
            let p = basis.eval_all(t);
            (0..4)
                .step_by(2)
                .map(|l| filter.eval(l as f64 / 4.0) / mask.coeffs()[l] * ratio * basis.values_at_one()[l] * p[l])
                .sum()
        };
        for x in probes(2, 10) {
            let mut total = 0.0;
            for (c, wc) in discretizing.cloud.points().iter().zip(&discretizing.weights) {
                let mut inner = 0.0;
                for ((y, wy), v) in sampling.cloud.points().iter().zip(&sampling.weights).zip(&values) {
                    inner += wy * v * kernel(dot(c, y));
                }
                total += wc * inner * dot(&x, c).abs();
            }
            let got = net.eval(&x);
            assert!((got - total).abs() <= 1e-12 * total.abs().max(1.0), "{got} vs {total}");
        }
    }

    #[test]
    fn builds_reject_bad_rules() {
        let good = QuadratureRule::product_s2(9).unwrap();
        let mut bad = good.clone();
        bad.weights[0] += 0.1;
        let bad = QuadratureRule::certify(bad.cloud, bad.weights, bad.order).unwrap();
        let values = vec![1.0; good.len()];
        let filter = FilterSpec::quintic();
        assert!(matches!(
            synthesize(&bad, &values, &good, 4.0, 0.0, &filter),
            Err(Error::QuadratureFailure(_))
        ));
        assert!(matches!(
            synthesize(&good, &values[1..], &good, 4.0, 0.0, &filter),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn product_residual_agrees_with_certification() {
        let fast = QuadratureRule::product_s2(13).unwrap();
        let full = QuadratureRule::certify(fast.cloud.clone(), fast.weights.clone(), 13).unwrap();
        assert!(fast.moment_residual < 1e-12 && full.moment_residual < 1e-12);
        let coarse = QuadratureRule::certify(fast.cloud.clone(), fast.weights.clone(), 16).unwrap();
        assert!(coarse.moment_residual > 1e-3);
    }

    #[test]
    fn network_json_round_trip() {
        let net = ZonalNetwork {
            gamma: 0.0,
            centers: vec![vec![0.0, 0.0, 1.0]],
            coeffs: vec![0.25],
        };
        let back: ZonalNetwork = serde_json::from_str(&serde_json::to_string(&net).unwrap()).unwrap();
        assert_eq!(back, net);
        assert_eq!(net.eval(&[0.6, 0.0, -0.8]), 0.25 * 0.8);
    }
}
