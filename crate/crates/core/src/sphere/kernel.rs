//! The localized zonal kernel
//! `Phi_{n,q}(t) = (omega_q / omega_{q-1}) sum_{l < n} h(l/n) p_{l,q}(1) p_{l,q}(t)`.

use serde::{Deserialize, Serialize};

use super::ultraspherical::UltrasphericalBasis;
use super::volume_ratio;
use crate::error::{Error, Result};
use crate::filters::FilterSpec;

/// `Phi_{n,q}` stored by its coefficients in the orthonormal basis `p_{l,q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalKernel {
    q: usize,
    n: f64,
    filter: FilterSpec,
    coeffs: Vec<f64>,
    basis: UltrasphericalBasis,
}

/// Serializable form of a [`SphericalKernel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelRecord {
    pub q: usize,
    pub n: f64,
    pub filter: FilterSpec,
    pub coeffs: Vec<f64>,
}

impl SphericalKernel {
    pub fn new(q: usize, n: f64, filter: &FilterSpec) -> Result<Self> {
        Self::with_weights(q, n, filter, |l| filter.eval(l as f64 / n))
    }

    /// Kernel with an arbitrary spectral weight in place of `h(l/n)`; only
    /// degrees `l < n` are kept.
    pub(crate) fn with_weights(
        q: usize,
        n: f64,
        filter: &FilterSpec,
        weight: impl Fn(usize) -> f64,
    ) -> Result<Self> {
        if !(n >= 1.0) || !n.is_finite() {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: format!("kernel degree must be >= 1, got {n}"),
            });
        }
        let terms = n.ceil() as usize;
        let basis = UltrasphericalBasis::new(q, terms.max(1))?;
        let ratio = volume_ratio(q);
        let at_one = basis.values_at_one();
        let coeffs = (0..terms)
            .map(|l| ratio * weight(l) * at_one[l])
            .collect();
        Ok(Self {
            q,
            n,
            filter: filter.clone(),
            coeffs,
            basis,
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn filter(&self) -> &FilterSpec {
        &self.filter
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn basis(&self) -> &UltrasphericalBasis {
        &self.basis
    }

    /// `Phi_{n,q}(t)`; inputs within `1e-12` outside `[-1, 1]` are clamped.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t.abs() > 1.0 + 1e-12 || t.is_nan() {
            return Err(Error::OutOfDomain(t));
        }
        Ok(self.eval_clamped(t))
    }

    /// Same as [`eval`](Self::eval) but clamps any input.
    pub fn eval_clamped(&self, t: f64) -> f64 {
        self.basis.clenshaw(&self.coeffs, t.clamp(-1.0, 1.0))
    }

    /// Clamped evaluation at four arguments at once.
    pub fn eval4_clamped(&self, t: [f64; 4]) -> [f64; 4] {
        self.basis
            .clenshaw4(&self.coeffs, t.map(|x| x.clamp(-1.0, 1.0)))
    }

    /// Term-by-term evaluation without the backward recurrence.
    pub fn eval_direct(&self, t: f64) -> f64 {
        let values = self.basis.eval_all(t.clamp(-1.0, 1.0));
        self.coeffs.iter().zip(&values).map(|(c, p)| c * p).sum()
    }

    pub fn to_record(&self) -> KernelRecord {
        KernelRecord {
            q: self.q,
            n: self.n,
            filter: self.filter.clone(),
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn from_record(record: &KernelRecord) -> Result<Self> {
        let mut kernel = Self::new(record.q, record.n, &record.filter)?;
        if kernel.coeffs.len() != record.coeffs.len() {
            return Err(Error::LengthMismatch {
                what: "kernel coefficients",
                got: record.coeffs.len(),
                expected: kernel.coeffs.len(),
            });
        }
        kernel.coeffs.clone_from(&record.coeffs);
        Ok(kernel)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sharp_value_at_one_is_dimension() {
        for n in [1usize, 4, 9, 16] {
            let k = SphericalKernel::new(2, n as f64, &FilterSpec::sharp()).unwrap();
            let v = k.eval(1.0).unwrap();
            assert!((v - (n * n) as f64).abs() < 1e-9 * (n * n) as f64, "n={n}: {v}");
        }
    }

    #[test]
    fn rejects_far_arguments() {
        let k = SphericalKernel::new(2, 8.0, &FilterSpec::quintic()).unwrap();
        assert!(k.eval(1.0 + 1e-13).is_ok());
        assert!(matches!(k.eval(1.01), Err(Error::OutOfDomain(_))));
        assert!(SphericalKernel::new(2, 0.5, &FilterSpec::quintic()).is_err());
    }

    #[test]
    fn record_round_trip() {
        let k = SphericalKernel::new(3, 12.0, &FilterSpec::smooth_bump()).unwrap();
        let json = serde_json::to_string(&k.to_record()).unwrap();
        let back: KernelRecord = serde_json::from_str(&json).unwrap();
        let k2 = SphericalKernel::from_record(&back).unwrap();
        assert_eq!(k, k2);
    }
}
