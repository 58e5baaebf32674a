//! Gauss-Jacobi rules by the Golub-Welsch eigenvalue method.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Nodes and weights of an `m`-point rule for `(1-t)^alpha (1+t)^beta` on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// `m`-point Gauss-Jacobi rule, exact for polynomials of degree `2m - 1`.
pub fn gauss_jacobi_general(m: usize, alpha: f64, beta: f64) -> Result<GaussRule> {
    if m == 0 {
        return Err(Error::InvalidParameter {
            name: "m",
            reason: "a Gauss rule needs at least one node".into(),
        });
    }
    if alpha <= -1.0 || beta <= -1.0 {
        return Err(Error::InvalidParameter {
            name: "alpha/beta",
            reason: format!("Jacobi exponents must exceed -1, got ({alpha}, {beta})"),
        });
    }
    let (diag, offdiag) = jacobi_matrix(m, alpha, beta);
    let mu0 = jacobi_mass(alpha, beta);
    if m == 1 {
        return Ok(GaussRule {
            nodes: vec![diag[0]],
            weights: vec![mu0],
        });
    }
    let mut mat = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        mat[(i, i)] = diag[i];
        if i + 1 < m {
            mat[(i, i + 1)] = offdiag[i];
            mat[(i + 1, i)] = offdiag[i];
        }
    }
    let eig = SymmetricEigen::new(mat);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

/// Rule for the ultraspherical weight `(1 - t^2)^(q/2 - 1)` of `S^q`.
pub fn gauss_jacobi(q: usize, m: usize) -> Result<GaussRule> {
    if q == 0 {
        return Err(Error::InvalidParameter {
            name: "q",
            reason: "sphere dimension must be at least 1".into(),
        });
    }
    let lambda = q as f64 / 2.0 - 1.0;
    gauss_jacobi_general(m, lambda, lambda)
}

/// `int_{-1}^{1} (1-t)^alpha (1+t)^beta dt`.
pub fn jacobi_mass(alpha: f64, beta: f64) -> f64 {
    ((alpha + beta + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(alpha + beta + 2.0))
    .exp()
}

/// Diagonal and off-diagonal of the symmetric Jacobi matrix of size `m`.
fn jacobi_matrix(m: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut diag = Vec::with_capacity(m);
    let mut off = Vec::with_capacity(m.saturating_sub(1));
    for k in 0..m {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let d = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else if (b * b - a * a) == 0.0 {
            0.0
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
        diag.push(d);
        if k + 1 < m {
            off.push(jacobi_beta(k + 1, a, b).sqrt());
        }
    }
    (diag, off)
}

/// Monic recurrence coefficient `beta_k` (k >= 1) of the Jacobi polynomials.
pub(crate) fn jacobi_beta(k: usize, a: f64, b: f64) -> f64 {
    let kf = k as f64;
    if k == 1 {
        let s = a + b + 2.0;
        return 4.0 * (1.0 + a) * (1.0 + b) / (s * s * (s + 1.0));
    }
    let s = 2.0 * kf + a + b;
    4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (s * s * (s + 1.0) * (s - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_legendre() {
        let rule = gauss_jacobi(2, 2).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert!((rule.nodes[0] + r).abs() < 1e-14);
        assert!((rule.nodes[1] - r).abs() < 1e-14);
        assert!((rule.weights[0] - 1.0).abs() < 1e-14);
        assert!((rule.weights[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn chebyshev_first_kind() {
        let m = 7;
        let rule = gauss_jacobi(1, m).unwrap();
        for (i, (&t, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
            let expected = -((2 * i + 1) as f64 * std::f64::consts::PI / (2 * m) as f64).cos();
            assert!((t - expected).abs() < 1e-13, "{t} vs {expected}");
            assert!((w - std::f64::consts::PI / m as f64).abs() < 1e-13);
        }
    }

    #[test]
    fn asymmetric_moments() {
        // int_{-1}^1 (1-t)^a (1+t)^b (1+t)^k dt = 2^{a+b+k+1} B(a+1, b+k+1)
        let (a, b) = (0.3, 1.7);
        let m = 6;
        let rule = gauss_jacobi_general(m, a, b).unwrap();
        for k in 0..(2 * m) {
            let exact = jacobi_mass(a, b + k as f64);
            let approx = rule.integrate(|t| (1.0 + t).powi(k as i32));
            assert!((approx - exact).abs() < 1e-12 * exact.max(1.0), "k={k}");
        }
    }

    #[test]
    fn rejects_empty_rule() {
        assert!(gauss_jacobi(2, 0).is_err());
        assert!(gauss_jacobi_general(3, -1.0, 0.0).is_err());
    }
}
