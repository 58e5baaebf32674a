//! Polynomial machinery on the unit sphere `S^q` of `R^{q+1}`.
//!
//! Measures are normalized to probability measures throughout, so the
//! constant function has unit norm and harmonic coefficients are plain
//! averages.

mod gauss;
mod harmonics;
mod kernel;
mod ultraspherical;

pub use gauss::{gauss_jacobi, gauss_jacobi_general, jacobi_mass, GaussRule};
pub use harmonics::HarmonicBasis2;
pub use kernel::{KernelRecord, SphericalKernel};
pub use ultraspherical::UltrasphericalBasis;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Surface area `omega_q` of `S^q`.
pub fn volume_omega(q: usize) -> f64 {
    let a = (q as f64 + 1.0) / 2.0;
    2.0 * (a * std::f64::consts::PI.ln() - ln_gamma(a)).exp()
}

/// `omega_q / omega_{q-1}`, the constant in the addition formula.
pub fn volume_ratio(q: usize) -> f64 {
    volume_omega(q) / volume_omega(q - 1)
}

/// A unit vector of `R^{q+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpherePoint(Vec<f64>);

impl SpherePoint {
    /// Accepts `coords` if its norm is within `1e-12` of one.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if coords.len() < 2 || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "point",
                reason: format!("not a unit vector (norm {norm})"),
            });
        }
        Ok(Self(coords))
    }

    /// Rescales `coords` onto the sphere.
    pub fn normalized(mut coords: Vec<f64>) -> Result<Self> {
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if coords.len() < 2 || norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter {
                name: "point",
                reason: "cannot normalize a zero or non-finite vector".into(),
            });
        }
        coords.iter_mut().for_each(|c| *c /= norm);
        Ok(Self(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Dimension `q` of the sphere the point lives on.
    pub fn sphere_dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        dot(&self.0, &other.0)
    }

    /// Geodesic distance `arccos(x . y)`.
    pub fn distance(&self, other: &SpherePoint) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Product rule on `S^2` for the probability measure, exact through
/// polynomial degree `exactness`: Gauss-Legendre in `x3` times equispaced
/// azimuths.
pub fn product_rule_s2(exactness: usize) -> Result<(Vec<SpherePoint>, Vec<f64>)> {
    let m = exactness / 2 + 1;
    let legendre = gauss_jacobi(2, m)?;
    let az = exactness + 1;
    let mut points = Vec::with_capacity(m * az);
    let mut weights = Vec::with_capacity(m * az);
    for (&z, &w) in legendre.nodes.iter().zip(&legendre.weights) {
        let r = (1.0 - z * z).max(0.0).sqrt();
        for i in 0..az {
            let phi = 2.0 * std::f64::consts::PI * i as f64 / az as f64;
            points.push(SpherePoint(vec![r * phi.cos(), r * phi.sin(), z]));
            weights.push(w / (2.0 * az as f64));
        }
    }
    Ok((points, weights))
}

/// Draws `count` points from the uniform distribution on `S^q`.
pub fn uniform_points<R: Rng>(q: usize, count: usize, rng: &mut R) -> Vec<SpherePoint> {
    (0..count)
        .map(|_| loop {
            let v: Vec<f64> = (0..=q).map(|_| rng.sample(StandardNormal)).collect();
            if let Ok(p) = SpherePoint::normalized(v) {
                break p;
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn product_rule_integrates_monomials() {
        let (pts, w) = product_rule_s2(12).unwrap();
        let total: f64 = w.iter().sum();
        assert!((total - 1.0).abs() < 1e-13);
        // E[x3^4] = 1/5, E[x1^2 x2^2] = 1/15 under the uniform measure
        let m4: f64 = pts.iter().zip(&w).map(|(p, w)| w * p.coords()[2].powi(4)).sum();
        let m22: f64 = pts
            .iter()
            .zip(&w)
            .map(|(p, w)| w * (p.coords()[0] * p.coords()[1]).powi(2))
            .sum();
        assert!((m4 - 0.2).abs() < 1e-13);
        assert!((m22 - 1.0 / 15.0).abs() < 1e-13);
    }

    #[test]
    fn omega_closed_forms() {
        assert!((volume_omega(1) - 2.0 * PI).abs() < 1e-13);
        assert!((volume_omega(2) - 4.0 * PI).abs() < 1e-12);
        assert!((volume_omega(3) - 2.0 * PI * PI).abs() < 1e-12);
        assert!((volume_omega(0) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn omega_recursion() {
        for q in 2..12 {
            let qf = q as f64;
            let rec = PI.sqrt() * (ln_gamma(qf / 2.0) - ln_gamma(qf / 2.0 + 0.5)).exp()
                * volume_omega(q - 1);
            assert!((rec - volume_omega(q)).abs() < 1e-11 * rec);
        }
    }

    #[test]
    fn point_validation() {
        assert!(SpherePoint::new(vec![1.0, 0.0, 0.0]).is_ok());
        assert!(SpherePoint::new(vec![1.0, 1.0, 0.0]).is_err());
        let p = SpherePoint::normalized(vec![3.0, 4.0]).unwrap();
        assert!((p.coords()[1] - 0.8).abs() < 1e-15);
        assert!(SpherePoint::normalized(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn antipodal_distance() {
        let a = SpherePoint::new(vec![0.0, 0.0, 1.0]).unwrap();
        let b = SpherePoint::new(vec![0.0, 0.0, -1.0]).unwrap();
        assert!((a.distance(&b) - PI).abs() < 1e-15);
    }
}
