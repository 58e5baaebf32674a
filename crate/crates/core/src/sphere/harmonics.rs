//! Real spherical harmonics on `S^2`, orthonormal for the probability
//! measure (so `Y_{0,1} = 1`).
//!
//! Degree `l` occupies indices `l^2 .. (l+1)^2`; within a degree the order
//! is `m = 0`, then `cos(m phi)` and `sin(m phi)` for `m = 1, 2, ...`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicBasis2 {
    degree: usize,
    /// `(a_lm, b_lm)` for the associated Legendre recurrence, row-major in `(m, l)`.
    rec: Vec<(f64, f64)>,
    diag: Vec<f64>,
}

impl HarmonicBasis2 {
    /// Harmonics of degree `l < degree`; `degree^2` functions in total.
    pub fn new(degree: usize) -> Self {
        let n = degree;
        let mut rec = vec![(0.0, 0.0); n * n];
        for m in 0..n {
            for l in (m + 2)..n {
                let (lf, mf) = (l as f64, m as f64);
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let lm1 = lf - 1.0;
                let b = ((lm1 * lm1 - mf * mf) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
                rec[m * n + l] = (a, b);
            }
        }
        let diag = (0..n)
            .map(|m| {
                if m == 0 {
                    1.0
                } else {
                    ((2 * m + 1) as f64 / (2 * m) as f64).sqrt()
                }
            })
            .collect();
        Self { degree, rec, diag }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of basis functions, `degree^2`.
    pub fn dim(&self) -> usize {
        self.degree * self.degree
    }

    /// Flat index of `Y_{l,k}`, `1 <= k <= 2l + 1`.
    pub fn index(&self, l: usize, k: usize) -> Result<usize> {
        if l >= self.degree || k == 0 || k > 2 * l + 1 {
            return Err(Error::IndexOutOfRange(format!(
                "Y_({l},{k}) with degree bound {}",
                self.degree
            )));
        }
        Ok(l * l + k - 1)
    }

    /// Degree `l` of the flat index `idx`.
    pub fn degree_of(idx: usize) -> usize {
        (idx as f64).sqrt().floor() as usize
    }

    /// Single harmonic `Y_{l,k}(x)`.
    pub fn eval(&self, l: usize, k: usize, x: &[f64]) -> Result<f64> {
        let idx = self.index(l, k)?;
        let mut out = vec![0.0; self.dim()];
        self.eval_all(x, &mut out);
        Ok(out[idx])
    }

    /// Writes every harmonic at `x = (x1, x2, x3)` into `out[..dim]`.
    pub fn eval_all(&self, x: &[f64], out: &mut [f64]) {
        let n = self.degree;
        if n == 0 {
            return;
        }
        debug_assert!(out.len() >= n * n);
        let z = x[2].clamp(-1.0, 1.0);
        let rho = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let (cphi, sphi) = if rho > 0.0 {
            (x[0] / rho, x[1] / rho)
        } else {
            (1.0, 0.0)
        };
        let s = (1.0 - z * z).max(0.0).sqrt();
        let sqrt2 = std::f64::consts::SQRT_2;

        let mut pmm = 1.0;
        let (mut cm, mut sm) = (1.0, 0.0);
        for m in 0..n {
            if m > 0 {
                pmm *= self.diag[m] * s;
                let c = cm * cphi - sm * sphi;
                sm = sm * cphi + cm * sphi;
                cm = c;
            }
            let (fc, fs) = if m == 0 { (1.0, 0.0) } else { (sqrt2 * cm, sqrt2 * sm) };
            let mut put = |l: usize, p: f64| {
                if m == 0 {
                    out[l * l] = p;
                } else {
                    out[l * l + 2 * m - 1] = p * fc;
                    out[l * l + 2 * m] = p * fs;
                }
            };
            put(m, pmm);
            if m + 1 >= n {
                continue;
            }
            let mut p_prev = pmm;
            let mut p_cur = ((2 * m + 3) as f64).sqrt() * z * pmm;
            put(m + 1, p_cur);
            let row = &self.rec[m * n..(m + 1) * n];
            for (l, &(a, b)) in row.iter().enumerate().skip(m + 2) {
                let p_next = a * (z * p_cur - b * p_prev);
                p_prev = p_cur;
                p_cur = p_next;
                put(l, p_cur);
            }
        }
    }

    /// Evaluates every harmonic at four points at once, writing the rows
    /// `out[b * dim .. (b + 1) * dim]`. Interleaving independent points keeps
    /// the Legendre recurrences from stalling on each other.
    pub fn eval_block4(&self, xs: [&[f64]; 4], out: &mut [f64]) {
        let n = self.degree;
        let dim = n * n;
        if n == 0 {
            return;
        }
        debug_assert!(out.len() >= 4 * dim);
        let mut z = [0.0; 4];
        let mut s = [0.0; 4];
        let mut cphi = [1.0; 4];
        let mut sphi = [0.0; 4];
        for b in 0..4 {
            let x = xs[b];
            z[b] = x[2].clamp(-1.0, 1.0);
            let rho = (x[0] * x[0] + x[1] * x[1]).sqrt();
            if rho > 0.0 {
                cphi[b] = x[0] / rho;
                sphi[b] = x[1] / rho;
            }
            s[b] = (1.0 - z[b] * z[b]).max(0.0).sqrt();
        }
        let sqrt2 = std::f64::consts::SQRT_2;
        let mut pmm = [1.0; 4];
        let mut cm = [1.0; 4];
        let mut sm = [0.0; 4];
        let mut fc = [1.0; 4];
        let mut fs = [0.0; 4];
        for m in 0..n {
            if m > 0 {
                for b in 0..4 {
                    pmm[b] *= self.diag[m] * s[b];
                    let c = cm[b] * cphi[b] - sm[b] * sphi[b];
                    sm[b] = sm[b] * cphi[b] + cm[b] * sphi[b];
                    cm[b] = c;
                    fc[b] = sqrt2 * cm[b];
                    fs[b] = sqrt2 * sm[b];
                }
            }
            let (c_off, s_off) = if m == 0 { (0, 0) } else { (2 * m - 1, 2 * m) };
            let mut store = |l: usize, p: &[f64; 4]| {
                for b in 0..4 {
                    let base = b * dim + l * l;
                    if m == 0 {
                        out[base] = p[b];
                    } else {
                        out[base + c_off] = p[b] * fc[b];
                        out[base + s_off] = p[b] * fs[b];
                    }
                }
            };
            store(m, &pmm);
            if m + 1 >= n {
                continue;
            }
            let mut p_prev = pmm;
            let lead = ((2 * m + 3) as f64).sqrt();
            let mut p_cur = [0.0; 4];
            for b in 0..4 {
                p_cur[b] = lead * z[b] * pmm[b];
            }
            store(m + 1, &p_cur);
            let row = &self.rec[m * n..(m + 1) * n];
            for (l, &(a, bb)) in row.iter().enumerate().skip(m + 2) {
                let mut p_next = [0.0; 4];
                for b in 0..4 {
                    p_next[b] = a * (z[b] * p_cur[b] - bb * p_prev[b]);
                }
                p_prev = p_cur;
                p_cur = p_next;
                store(l, &p_cur);
            }
        }
    }
}
