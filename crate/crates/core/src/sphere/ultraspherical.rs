//! Orthonormal ultraspherical polynomials `p_{l,q}` for the weight
//! `(1 - t^2)^(q/2 - 1)` on `[-1, 1]`.

use super::gauss::{jacobi_beta, jacobi_mass};
use crate::error::{Error, Result};

/// Three-term recurrence data for `p_{0,q}, ..., p_{max_degree,q}`.
///
/// The polynomials satisfy `t p_l = a_{l+1} p_{l+1} + a_l p_{l-1}` with
/// `p_0 = 1 / sqrt(int (1-t^2)^(q/2-1) dt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UltrasphericalBasis {
    q: usize,
    max_degree: usize,
    p0: f64,
    /// `a[l]` for `l = 0..=max_degree + 2`; `a[0]` is unused and zero.
    a: Vec<f64>,
    /// Clenshaw multipliers `(1 / a[k+1], -a[k+1] / a[k+2])` for each `k`.
    steps: Vec<(f64, f64)>,
    at_one: Vec<f64>,
}

impl UltrasphericalBasis {
    pub fn new(q: usize, max_degree: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidParameter {
                name: "q",
                reason: "sphere dimension must be at least 1".into(),
            });
        }
        let lambda = q as f64 / 2.0 - 1.0;
        let p0 = 1.0 / jacobi_mass(lambda, lambda).sqrt();
        let mut a = vec![0.0; max_degree + 3];
        for (l, al) in a.iter_mut().enumerate().skip(1) {
            *al = jacobi_beta(l, lambda, lambda).sqrt();
        }
        let steps = (0..=max_degree)
            .map(|k| (1.0 / a[k + 1], -a[k + 1] / a[k + 2]))
            .collect();
        let mut basis = Self {
            q,
            max_degree,
            p0,
            a,
            steps,
            at_one: Vec::new(),
        };
        basis.at_one = basis.eval_all(1.0);
        Ok(basis)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Recurrence coefficient `a_l`.
    pub fn recurrence(&self, l: usize) -> f64 {
        self.a[l]
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    /// `p_{l,q}(1)` for every `l <= max_degree`.
    pub fn values_at_one(&self) -> &[f64] {
        &self.at_one
    }

    /// `p_{l,q}(t)`.
    pub fn eval(&self, l: usize, t: f64) -> Result<f64> {
        if l > self.max_degree {
            return Err(Error::DegreeOverflow {
                degree: l,
                max: self.max_degree,
            });
        }
        let mut prev = 0.0;
        let mut cur = self.p0;
        for k in 0..l {
            let next = (t * cur - self.a[k] * prev) / self.a[k + 1];
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    /// `[p_{0,q}(t), ..., p_{max_degree,q}(t)]`.
    pub fn eval_all(&self, t: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.max_degree + 1);
        let mut prev = 0.0;
        let mut cur = self.p0;
        out.push(cur);
        for k in 0..self.max_degree {
            let next = (t * cur - self.a[k] * prev) / self.a[k + 1];
            prev = cur;
            cur = next;
            out.push(cur);
        }
        out
    }

    /// `sum_l coeffs[l] p_{l,q}(t)` by Clenshaw's backward recurrence.
    pub fn clenshaw(&self, coeffs: &[f64], t: f64) -> f64 {
        debug_assert!(coeffs.len() <= self.max_degree + 1);
        let n = coeffs.len();
        if n == 0 {
            return 0.0;
        }
        // p_{k+1} = (t / a_{k+1}) p_k - (a_k / a_{k+1}) p_{k-1}
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for (c, &(inv, beta_next)) in coeffs.iter().zip(&self.steps).rev() {
            let b0 = c + t * inv * b1 + beta_next * b2;
            b2 = b1;
            b1 = b0;
        }
        self.p0 * b1
    }

    /// [`clenshaw`](Self::clenshaw) at four arguments at once.
    pub fn clenshaw4(&self, coeffs: &[f64], t: [f64; 4]) -> [f64; 4] {
        let mut b1 = [0.0; 4];
        let mut b2 = [0.0; 4];
        for (c, &(inv, beta_next)) in coeffs.iter().zip(&self.steps).rev() {
            for i in 0..4 {
                let b0 = c + t[i] * inv * b1[i] + beta_next * b2[i];
                b2[i] = b1[i];
                b1[i] = b0;
            }
        }
        b1.map(|b| self.p0 * b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clenshaw4_matches_scalar() {
        let basis = UltrasphericalBasis::new(3, 20).unwrap();
        let coeffs: Vec<f64> = (0..21).map(|k| 1.0 / (1.0 + k as f64)).collect();
        let ts = [-0.9, -0.1, 0.4, 1.0];
        let v = basis.clenshaw4(&coeffs, ts);
        for i in 0..4 {
            assert_eq!(v[i], basis.clenshaw(&coeffs, ts[i]));
        }
    }

    #[test]
    fn legendre_case() {
        let basis = UltrasphericalBasis::new(2, 5).unwrap();
        for &t in &[-0.7, 0.0, 0.3, 1.0] {
            assert!((basis.eval(0, t).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
            assert!((basis.eval(1, t).unwrap() - 1.5f64.sqrt() * t).abs() < 1e-15);
        }
    }

    #[test]
    fn odd_degrees_vanish_at_zero() {
        for q in 1..5 {
            let basis = UltrasphericalBasis::new(q, 21).unwrap();
            for l in (1..=21).step_by(2) {
                assert!(basis.eval(l, 0.0).unwrap().abs() < 1e-14);
            }
        }
    }

    #[test]
    fn chebyshev_case() {
        let basis = UltrasphericalBasis::new(1, 10).unwrap();
        let t: f64 = 0.37;
        let theta = t.acos();
        let c = (2.0 / std::f64::consts::PI).sqrt();
        for l in 1..=10 {
            let expected = c * (l as f64 * theta).cos();
            assert!((basis.eval(l, t).unwrap() - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn clenshaw_matches_sum() {
        let basis = UltrasphericalBasis::new(3, 40).unwrap();
        let coeffs: Vec<f64> = (0..41).map(|l| ((l * 7 % 11) as f64 - 5.0) / 3.0).collect();
        for &t in &[-1.0, -0.4, 0.0, 0.55, 1.0] {
            let direct: f64 = basis
                .eval_all(t)
                .iter()
                .zip(&coeffs)
                .map(|(p, c)| p * c)
                .sum();
            let fast = basis.clenshaw(&coeffs, t);
            assert!((direct - fast).abs() < 1e-10 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn degree_overflow() {
        let basis = UltrasphericalBasis::new(2, 3).unwrap();
        assert!(matches!(
            basis.eval(4, 0.1),
            Err(Error::DegreeOverflow { .. })
        ));
    }
}
