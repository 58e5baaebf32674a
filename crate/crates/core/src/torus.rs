//! Trigonometric localized kernels on the torus `T^q = [0, 2 pi)^q`.
//!
//! The central objects are the kernel
//! `Phi_n(x) = sum_k h(|k|_2 / n) exp(i k.x)`, the filtered projection
//! `sigma_n(nu; f)(x) = int f(y) Phi_n(x - y) d nu(y)` for a discrete measure
//! `nu`, and the dyadic details `tau_j = sigma_{2^j} - sigma_{2^{j-1}}`.
//! All sums run over the lattice points with `|k|_2 < n`.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::filters::{FilterKind, FilterSpec, Mask};

const TWO_PI: f64 = 2.0 * PI;

/// Reduces an angle into `[0, 2 pi)`.
pub fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(TWO_PI);
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

/// Signed difference `x - y` reduced into `[-pi, pi)`.
pub fn wrapped_diff(x: f64, y: f64) -> f64 {
    (x - y + PI).rem_euclid(TWO_PI) - PI
}

/// Lattice points `k` of `Z^q` with `|k|_2 < n`, in lexicographic order.
pub fn lattice(q: usize, n: f64) -> Vec<Vec<i64>> {
    let r = n.ceil() as i64;
    let mut out = Vec::new();
    let mut k = vec![-r; q];
    if q == 0 {
        return out;
    }
    loop {
        let norm2: i64 = k.iter().map(|c| c * c).sum();
        if (norm2 as f64) < n * n {
            out.push(k.clone());
        }
        let mut axis = q;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            if k[axis] < r {
                k[axis] += 1;
                break;
            }
            k[axis] = -r;
        }
    }
}

fn norm(k: &[i64]) -> f64 {
    (k.iter().map(|c| (c * c) as f64).sum::<f64>()).sqrt()
}

fn phase(k: &[i64], x: &[f64]) -> f64 {
    k.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum()
}

/// Point samples on `T^q`, optionally carrying quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusSamples {
    q: usize,
    points: Vec<Vec<f64>>,
    values: Vec<Complex64>,
    weights: Option<Vec<f64>>,
    /// Set when the samples are the full equispaced grid with uniform weights.
    grid_size: Option<usize>,
}

impl TorusSamples {
    pub fn new(
        q: usize,
        points: Vec<Vec<f64>>,
        values: Vec<Complex64>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidParameter {
                name: "q",
                reason: "torus dimension must be positive".into(),
            });
        }
        if values.len() != points.len() {
            return Err(Error::LengthMismatch {
                what: "values",
                got: values.len(),
                expected: points.len(),
            });
        }
        if let Some(w) = &weights {
            if w.len() != points.len() {
                return Err(Error::LengthMismatch {
                    what: "weights",
                    got: w.len(),
                    expected: points.len(),
                });
            }
        }
        let points = points
            .into_iter()
            .map(|p| {
                if p.len() != q {
                    Err(Error::LengthMismatch {
                        what: "point coordinates",
                        got: p.len(),
                        expected: q,
                    })
                } else {
                    Ok(p.into_iter().map(wrap).collect())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            q,
            points,
            values,
            weights,
            grid_size: None,
        })
    }

    /// Real-valued samples.
    pub fn from_real(
        q: usize,
        points: Vec<Vec<f64>>,
        values: &[f64],
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        let values = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::new(q, points, values, weights)
    }

    /// Samples of `f` on the grid `{2 pi m / size : m in [0, size)^q}` with
    /// the equal weights `size^{-q}`.
    pub fn grid(q: usize, size: usize, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let points = grid_points(q, size);
        let values = points.iter().map(|p| f(p)).collect();
        let total = points.len();
        Self {
            q,
            points,
            values,
            weights: Some(vec![1.0 / total as f64; total]),
            grid_size: Some(size),
        }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.points.len() {
            return Err(Error::LengthMismatch {
                what: "weights",
                got: weights.len(),
                expected: self.points.len(),
            });
        }
        self.weights = Some(weights);
        self.grid_size = None;
        Ok(self)
    }

    /// Same points, new values.
    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        let mut out = Self::new(self.q, self.points.clone(), values, self.weights.clone())?;
        out.grid_size = self.grid_size;
        Ok(out)
    }
}

/// Points of the equispaced grid with `size` points per axis, row-major.
pub fn grid_points(q: usize, size: usize) -> Vec<Vec<f64>> {
    let total = size.pow(q as u32);
    (0..total)
        .map(|mut idx| {
            let mut p = vec![0.0; q];
            for axis in (0..q).rev() {
                p[axis] = TWO_PI * (idx % size) as f64 / size as f64;
                idx /= size;
            }
            p
        })
        .collect()
}

/// Fourier coefficients indexed by lattice points with `|k|_2 < band_limit`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierExpansion {
    pub q: usize,
    pub band_limit: f64,
    pub coeffs: BTreeMap<Vec<i64>, Complex64>,
}

impl FourierExpansion {
    pub fn get(&self, k: &[i64]) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// `sum_k c_k exp(i k.x)`.
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(k, c)| c * Complex64::from_polar(1.0, phase(k, x)))
            .sum()
    }

    /// Multiplies each coefficient by `weight(|k|_2)` and drops zeros.
    pub fn map_spectrum(&self, weight: impl Fn(f64) -> f64) -> FourierExpansion {
        let coeffs = self
            .coeffs
            .iter()
            .filter_map(|(k, c)| {
                let w = weight(norm(k));
                (w != 0.0).then(|| (k.clone(), c * w))
            })
            .collect();
        FourierExpansion {
            q: self.q,
            band_limit: self.band_limit,
            coeffs,
        }
    }

    /// `sigma_n` applied to the expansion: multiplier `h(|k|_2 / n)`.
    pub fn filtered(&self, filter: &FilterSpec, n: f64) -> FourierExpansion {
        let mut out = self.map_spectrum(|r| if r < n { filter.eval(r / n) } else { 0.0 });
        out.band_limit = out.band_limit.min(n);
        out
    }

    pub fn sub(&self, other: &FourierExpansion) -> FourierExpansion {
        let mut coeffs = self.coeffs.clone();
        for (k, c) in &other.coeffs {
            *coeffs.entry(k.clone()).or_default() -= c;
        }
        FourierExpansion {
            q: self.q,
            band_limit: self.band_limit.max(other.band_limit),
            coeffs,
        }
    }
}

/// Discrete Fourier coefficients of exact grid samples, `|k|_2 < n`.
///
/// The samples must hit every point `2 pi m / N`, `m in [0, N)^q`, exactly
/// once (in any order), and `n <= N / 2`.
pub fn grid_coeffs(samples: &TorusSamples, n: f64) -> Result<FourierExpansion> {
    let q = samples.q;
    let total = samples.len();
    let size = (total as f64).powf(1.0 / q as f64).round() as usize;
    if size == 0 || size.pow(q as u32) != total {
        return Err(Error::GridMismatch {
            size: total,
            reason: format!("{total} samples is not a perfect {q}-th power"),
        });
    }
    if n > size as f64 / 2.0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("band limit {n} exceeds half the grid size {size}"),
        });
    }
    let mut data = vec![Complex64::default(); total];
    let mut seen = vec![false; total];
    let step = TWO_PI / size as f64;
    for (p, v) in samples.points.iter().zip(&samples.values) {
        let mut flat = 0usize;
        for &c in p {
            let m = (c / step).round();
            if (c - m * step).abs() > 1e-9 {
                return Err(Error::GridMismatch {
                    size,
                    reason: format!("coordinate {c} is off the grid"),
                });
            }
            flat = flat * size + (m as usize % size);
        }
        if seen[flat] {
            return Err(Error::GridMismatch {
                size,
                reason: "grid point sampled twice".into(),
            });
        }
        seen[flat] = true;
        data[flat] = *v;
    }
    fft_nd(&mut data, q, size);
    let scale = 1.0 / total as f64;
    let coeffs = lattice(q, n)
        .into_iter()
        .map(|k| {
            let flat = k.iter().fold(0usize, |acc, &c| {
                acc * size + c.rem_euclid(size as i64) as usize
            });
            let c = data[flat] * scale;
            (k, c)
        })
        .collect();
    Ok(FourierExpansion {
        q,
        band_limit: n,
        coeffs,
    })
}

/// In-place forward transform along every axis of a row-major `size^q` array.
fn fft_nd(data: &mut [Complex64], q: usize, size: usize) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(size);
    let mut line = vec![Complex64::default(); size];
    for axis in 0..q {
        let stride = size.pow((q - 1 - axis) as u32);
        let block = stride * size;
        for start in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + offset + i * stride];
                }
                fft.process(&mut line);
                for (i, v) in line.iter().enumerate() {
                    data[start + offset + i * stride] = *v;
                }
            }
        }
    }
}

/// `sum_j w_j f(x_j) exp(-i k.x_j)` for every lattice point `|k|_2 < n`.
pub fn discrete_coeffs(data: &TorusSamples, n: f64) -> Result<FourierExpansion> {
    let weights = data.weights.as_ref().ok_or(Error::MissingWeights)?;
    let ks = lattice(data.q, n);
    let coeffs = ks
        .into_iter()
        .map(|k| {
            let c: Complex64 = data
                .points
                .iter()
                .zip(&data.values)
                .zip(weights)
                .map(|((p, v), w)| v * (*w) * Complex64::from_polar(1.0, -phase(&k, p)))
                .sum();
            (k, c)
        })
        .collect();
    Ok(FourierExpansion {
        q: data.q,
        band_limit: n,
        coeffs,
    })
}

/// A real, even trigonometric kernel `sum_k w(|k|_2) exp(i k.x)`.
#[derive(Debug, Clone)]
pub struct TorusKernel {
    q: usize,
    /// Half lattice with pairing multiplicity folded into the weight.
    terms: Vec<(Vec<i64>, f64)>,
}

impl TorusKernel {
    pub fn new(q: usize, n: f64, weight: impl Fn(f64) -> f64) -> Self {
        let terms = lattice(q, n)
            .into_iter()
            .filter_map(|k| {
                let lead = k.iter().find(|&&c| c != 0).copied().unwrap_or(0);
                let w = weight(norm(&k));
                match lead.signum() {
                    0 => Some((k, w)),
                    1 if w != 0.0 => Some((k, 2.0 * w)),
                    _ => None,
                }
            })
            .collect();
        Self { q, terms }
    }

    /// `Phi_n` for the filter `h`.
    pub fn phi(q: usize, n: f64, filter: &FilterSpec) -> Self {
        Self::new(q, n, |r| filter.eval(r / n))
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(k, w)| w * phase(k, x).cos())
            .sum()
    }
}

/// `Phi_n(x)` on `T^q`.
pub fn kernel_phi(q: usize, n: f64, filter: &FilterSpec, x: &[f64]) -> f64 {
    TorusKernel::phi(q, n, filter).eval(x)
}

fn check_level(n: f64) -> Result<()> {
    if !(n >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("degree must be >= 1, got {n}"),
        });
    }
    Ok(())
}

/// Filtered expansion `sigma_n(nu; f)` in coefficient form.
pub fn sigma_expansion(data: &TorusSamples, filter: &FilterSpec, n: f64) -> Result<FourierExpansion> {
    check_level(n)?;
    let coeffs = match data.grid_size {
        Some(size) if n <= size as f64 / 2.0 => grid_coeffs(data, n)?,
        _ => discrete_coeffs(data, n)?,
    };
    Ok(coeffs.filtered(filter, n))
}

/// `sigma_n(nu; f)(x) = sum_j w_j f(x_j) Phi_n(x - x_j)` at each probe.
pub fn sigma_n(
    data: &TorusSamples,
    filter: &FilterSpec,
    n: f64,
    probes: &[Vec<f64>],
) -> Result<Vec<Complex64>> {
    let expansion = sigma_expansion(data, filter, n)?;
    Ok(probes.iter().map(|x| expansion.eval(x)).collect())
}

/// Kernel-sum form of [`sigma_n`]; quadratic cost, kept as a cross-check.
pub fn sigma_n_direct(
    data: &TorusSamples,
    filter: &FilterSpec,
    n: f64,
    probes: &[Vec<f64>],
) -> Result<Vec<Complex64>> {
    check_level(n)?;
    let weights = data.weights.as_ref().ok_or(Error::MissingWeights)?;
    let kernel = TorusKernel::phi(data.q, n, filter);
    Ok(probes
        .iter()
        .map(|x| {
            data.points
                .iter()
                .zip(&data.values)
                .zip(weights)
                .map(|((p, v), w)| {
                    let d: Vec<f64> = x.iter().zip(p).map(|(a, b)| a - b).collect();
                    v * (w * kernel.eval(&d))
                })
                .sum()
        })
        .collect())
}

/// Monte-Carlo estimator `(1/M) sum_j y_j Phi_n(x - x_j)`; any weights
/// carried by `data` are ignored.
pub fn monte_carlo_sigma(
    data: &TorusSamples,
    filter: &FilterSpec,
    n: f64,
    probes: &[Vec<f64>],
) -> Result<Vec<Complex64>> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let m = data.len();
    let equal = TorusSamples {
        weights: Some(vec![1.0 / m as f64; m]),
        ..data.clone()
    };
    sigma_n(&equal, filter, n, probes)
}

/// Source of the discrete measure `nu_n` used at each level.
pub trait MeasureFamily {
    fn q(&self) -> usize;
    fn rule(&self, n: f64) -> Result<Cow<'_, TorusSamples>>;
}

/// Weighted samples act as the same measure at every level.
impl MeasureFamily for TorusSamples {
    fn q(&self) -> usize {
        self.q
    }

    fn rule(&self, _n: f64) -> Result<Cow<'_, TorusSamples>> {
        if self.weights.is_none() {
            return Err(Error::MissingWeights);
        }
        Ok(Cow::Borrowed(self))
    }
}

/// Samples a known function on the grid with `8 n` points per axis
/// (rounded up to a power of two), which integrates `Pi_{8n}` exactly.
pub struct DyadicGrid<F> {
    q: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> Complex64> DyadicGrid<F> {
    pub fn new(q: usize, f: F) -> Self {
        Self { q, f }
    }

    pub fn size_for(n: f64) -> usize {
        ((8.0 * n).ceil() as usize).next_power_of_two()
    }
}

impl<F: Fn(&[f64]) -> Complex64> MeasureFamily for DyadicGrid<F> {
    fn q(&self) -> usize {
        self.q
    }

    fn rule(&self, n: f64) -> Result<Cow<'_, TorusSamples>> {
        Ok(Cow::Owned(TorusSamples::grid(
            self.q,
            Self::size_for(n),
            &self.f,
        )))
    }
}

fn level_degree(j: u32) -> f64 {
    2f64.powi(j as i32)
}

/// Coefficients of `tau_j(nu; f)`.
pub fn tau_expansion(
    family: &dyn MeasureFamily,
    filter: &FilterSpec,
    j: u32,
) -> Result<FourierExpansion> {
    let top_rule = family.rule(level_degree(j))?;
    let top = sigma_expansion(&top_rule, filter, level_degree(j))?;
    if j == 0 {
        return Ok(top);
    }
    let low_rule = family.rule(level_degree(j - 1))?;
    let low = sigma_expansion(&low_rule, filter, level_degree(j - 1))?;
    Ok(top.sub(&low))
}

/// `tau_j(f)` at each probe: `sigma_1` for `j = 0`, else
/// `sigma_{2^j} - sigma_{2^{j-1}}`.
pub fn tau_j(
    family: &dyn MeasureFamily,
    filter: &FilterSpec,
    j: u32,
    probes: &[Vec<f64>],
) -> Result<Vec<Complex64>> {
    let e = tau_expansion(family, filter, j)?;
    Ok(probes.iter().map(|x| e.eval(x)).collect())
}

/// Synthesis multiplier for level `j`: `g~(r / 2^j)`, except at level zero
/// where the detail is `sigma_1` itself and `h(r / 2)` is used so that the
/// constant term survives.
fn synthesis_mask(filter: &FilterSpec, j: u32, r: f64) -> Result<f64> {
    if j == 0 {
        filter.mask(Mask::GTilde, 0.0)?;
        return Ok(filter.eval(r / 2.0));
    }
    filter.mask(Mask::GTilde, r / level_degree(j))
}

/// Synthesis kernel for level `j`, built from [`synthesis_mask`].
pub fn synthesis_kernel(q: usize, j: u32, filter: &FilterSpec) -> Result<TorusKernel> {
    synthesis_mask(filter, j, 0.0)?;
    Ok(TorusKernel::new(q, 2.0 * level_degree(j), |r| {
        synthesis_mask(filter, j, r).unwrap_or(0.0)
    }))
}

fn level_grid(q: usize, detail: &FourierExpansion, j: u32) -> TorusSamples {
    TorusSamples::grid(q, 1usize << (j + 3), |x| detail.eval(x))
}

/// One term of the wavelet-like expansion:
/// `N^{-q} sum_m tau_j(y_m) Psi~_j(x - y_m)` over the grid `y_m = 2 pi m / N`,
/// `N = 2^{j+3}`, evaluated through the grid transform.
pub fn wavelet_level(
    family: &dyn MeasureFamily,
    filter: &FilterSpec,
    j: u32,
    probes: &[Vec<f64>],
) -> Result<Vec<Complex64>> {
    let detail = tau_expansion(family, filter, j)?;
    let grid = level_grid(family.q(), &detail, j);
    let coeffs = grid_coeffs(&grid, 2.0 * level_degree(j))?;
    let synth = coeffs.map_spectrum(|r| synthesis_mask(filter, j, r).unwrap_or(0.0));
    Ok(probes.iter().map(|x| synth.eval(x)).collect())
}

/// Kernel-sum form of [`wavelet_level`]; used as a cross-check.
pub fn wavelet_level_direct(
    family: &dyn MeasureFamily,
    filter: &FilterSpec,
    j: u32,
    probes: &[Vec<f64>],
) -> Result<Vec<Complex64>> {
    let q = family.q();
    let detail = tau_expansion(family, filter, j)?;
    let grid = level_grid(q, &detail, j);
    let kernel = synthesis_kernel(q, j, filter)?;
    let w = 1.0 / grid.len() as f64;
    Ok(probes
        .iter()
        .map(|x| {
            grid.points
                .iter()
                .zip(&grid.values)
                .map(|(y, v)| {
                    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                    v * (w * kernel.eval(&d))
                })
                .sum()
        })
        .collect())
}

/// Truncated wavelet-like expansion `sum_{j <= big_j}` of [`wavelet_level`].
pub fn wavelet_expand(
    family: &dyn MeasureFamily,
    filter: &FilterSpec,
    big_j: u32,
    probes: &[Vec<f64>],
) -> Result<Vec<Complex64>> {
    let mut total = vec![Complex64::default(); probes.len()];
    for j in 0..=big_j {
        for (acc, v) in total.iter_mut().zip(wavelet_level(family, filter, j, probes)?) {
            *acc += v;
        }
    }
    Ok(total)
}

/// Probe points inside the max-norm ball of radius `radius` around `center`.
fn ball_probes(center: &[f64], radius: f64) -> Vec<Vec<f64>> {
    let q = center.len();
    let per_axis: usize = if q == 1 { 129 } else { 17 };
    let offsets: Vec<f64> = (0..per_axis)
        .map(|i| -radius + 2.0 * radius * i as f64 / (per_axis - 1) as f64)
        .collect();
    let total = per_axis.pow(q as u32);
    (0..total)
        .map(|mut idx| {
            let mut p = vec![0.0; q];
            for axis in (0..q).rev() {
                p[axis] = wrap(center[axis] + offsets[idx % per_axis]);
                idx /= per_axis;
            }
            p
        })
        .collect()
}

/// Local smoothness exponent at `x0`.
///
/// Fits `log2 max_{|x - x0| <= radius} |tau_j(f)(x)|` against `j` by ordinary
/// least squares over `levels` and returns the negated slope. Levels whose
/// detail is below `1e-14` are dropped; if fewer than two remain the function
/// is locally a polynomial at these scales and `f64::INFINITY` is returned.
pub fn local_smoothness(
    family: &dyn MeasureFamily,
    filter: &FilterSpec,
    x0: &[f64],
    radius: f64,
    levels: std::ops::RangeInclusive<u32>,
) -> Result<f64> {
    if levels.clone().count() < 4 {
        return Err(Error::InvalidParameter {
            name: "levels",
            reason: "need at least four dyadic levels".into(),
        });
    }
    if x0.len() != family.q() {
        return Err(Error::LengthMismatch {
            what: "x0",
            got: x0.len(),
            expected: family.q(),
        });
    }
    let probes = ball_probes(x0, radius);
    let mut pts = Vec::new();
    for j in levels {
        let detail = tau_j(family, filter, j, &probes)?;
        let peak = detail.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if peak >= 1e-14 {
            pts.push((j as f64, peak.log2()));
        }
    }
    if pts.len() < 2 {
        return Ok(f64::INFINITY);
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(-sxy / sxx)
}

/// Share of evaluation points whose error is at most `threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdShare {
    pub threshold: f64,
    pub percent: f64,
}

/// Pointwise error profile of one approximation on the evaluation grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub n: usize,
    pub filter: FilterKind,
    pub errors: Vec<ThresholdShare>,
    pub pointwise: Vec<f64>,
}

impl ErrorCurve {
    fn new(n: usize, filter: FilterKind, pointwise: Vec<f64>, thresholds: &[f64]) -> Self {
        let total = pointwise.len().max(1) as f64;
        let errors = thresholds
            .iter()
            .map(|&threshold| ThresholdShare {
                threshold,
                percent: 100.0 * pointwise.iter().filter(|e| **e <= threshold).count() as f64 / total,
            })
            .collect();
        Self {
            n,
            filter,
            errors,
            pointwise,
        }
    }

    /// Percentage of points with error at most `threshold`.
    pub fn percent_within(&self, threshold: f64) -> f64 {
        let total = self.pointwise.len().max(1) as f64;
        100.0 * self.pointwise.iter().filter(|e| **e <= threshold).count() as f64 / total
    }
}

/// Settings for comparing the truncated Fourier series with `sigma_n` on a
/// function with a few algebraic singularities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SingularityConfig {
    /// `f(x) = |cos x|^exponent`.
    pub exponent: f64,
    /// Equispaced sample grid defining the discrete measure.
    pub sample_size: usize,
    /// Equispaced points where errors are measured.
    pub eval_size: usize,
    pub degrees: Vec<usize>,
    pub filter: FilterKind,
    pub thresholds: Vec<f64>,
}

impl Default for SingularityConfig {
    fn default() -> Self {
        Self {
            exponent: 0.25,
            sample_size: 512,
            eval_size: 512,
            degrees: vec![128, 256],
            filter: FilterKind::Quintic,
            thresholds: (1..=8).map(|e| 10f64.powi(-e)).collect(),
        }
    }
}

/// Errors of the degree-`n` partial sum and of `sigma_n` at one degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityRow {
    pub degree: usize,
    pub projection: ErrorCurve,
    pub filtered: ErrorCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub eval_points: Vec<f64>,
    pub rows: Vec<SingularityRow>,
}

/// Partial sums versus filtered sums of `|cos x|^exponent`.
///
/// Both operators use the equal-weight grid measure on `sample_size`
/// points, so the partial sum is the discrete Fourier projection.
pub fn singularity_experiment(config: &SingularityConfig) -> Result<SingularityReport> {
    let top = config.degrees.iter().copied().max().unwrap_or(0);
    if top == 0 || config.eval_size == 0 {
        return Err(Error::InvalidParameter {
            name: "degrees",
            reason: "need at least one positive degree and evaluation point".into(),
        });
    }
    if 2 * top > config.sample_size {
        return Err(Error::InvalidParameter {
            name: "sample_size",
            reason: format!("grid of {} cannot resolve degree {top}", config.sample_size),
        });
    }
    let e = config.exponent;
    let f = move |x: f64| x.cos().abs().powf(e);
    let samples = TorusSamples::grid(1, config.sample_size, |p| Complex64::new(f(p[0]), 0.0));
    let full = grid_coeffs(&samples, top as f64)?;
    let eval_points: Vec<f64> = (0..config.eval_size)
        .map(|m| TWO_PI * m as f64 / config.eval_size as f64)
        .collect();
    let truth: Vec<f64> = eval_points.iter().map(|&x| f(x)).collect();
    let errors_of = |exp: &FourierExpansion| -> Vec<f64> {
        eval_points
            .iter()
            .zip(&truth)
            .map(|(&x, t)| (exp.eval(&[x]).re - t).abs())
            .collect()
    };
    let filter = FilterSpec::new(config.filter);
    let rows = config
        .degrees
        .iter()
        .map(|&n| {
            let nf = n as f64;
            let partial = full.map_spectrum(|r| if r < nf { 1.0 } else { 0.0 });
            let smooth = full.filtered(&filter, nf);
            SingularityRow {
                degree: n,
                projection: ErrorCurve::new(n, FilterKind::Sharp, errors_of(&partial), &config.thresholds),
                filtered: ErrorCurve::new(n, config.filter, errors_of(&smooth), &config.thresholds),
            }
        })
        .collect();
    Ok(SingularityReport { eval_points, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(f: impl Fn(f64) -> f64) -> impl Fn(&[f64]) -> Complex64 {
        move |x: &[f64]| Complex64::new(f(x[0]), 0.0)
    }

    #[test]
    fn lattice_counts() {
        assert_eq!(lattice(1, 4.0).len(), 7);
        assert_eq!(lattice(1, 4.5).len(), 9);
        // |k|^2 < 4 in Z^2: 0, (+-1,0),(0,+-1),(+-1,+-1)
        assert_eq!(lattice(2, 2.0).len(), 9);
    }

    #[test]
    fn grid_coeffs_of_exponential() {
        let s = TorusSamples::grid(1, 16, |x| Complex64::from_polar(1.0, 3.0 * x[0]));
        let c = grid_coeffs(&s, 8.0).unwrap();
        for (k, v) in &c.coeffs {
            let expected = if k[0] == 3 { 1.0 } else { 0.0 };
            assert!((v - expected).norm() < 1e-12, "k={k:?}");
        }
    }

    #[test]
    fn grid_coeffs_constant_and_cosine() {
        let s = TorusSamples::grid(2, 8, |_| Complex64::new(1.0, 0.0));
        let c = grid_coeffs(&s, 4.0).unwrap();
        assert!((c.get(&[0, 0]) - 1.0).norm() < 1e-14);
        let s = TorusSamples::grid(1, 8, real(f64::cos));
        let c = grid_coeffs(&s, 4.0).unwrap();
        assert!((c.get(&[1]) - 0.5).norm() < 1e-14);
        assert!((c.get(&[-1]) - 0.5).norm() < 1e-14);
    }

    #[test]
    fn grid_mismatch_detected() {
        let pts = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]];
        let s = TorusSamples::from_real(1, pts, &[1.0; 4], None).unwrap();
        assert!(matches!(grid_coeffs(&s, 1.0), Err(Error::GridMismatch { .. })));
        let pts = vec![vec![0.0], vec![0.0], vec![PI], vec![PI / 2.0]];
        let s = TorusSamples::from_real(1, pts, &[1.0; 4], None).unwrap();
        assert!(matches!(grid_coeffs(&s, 1.0), Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn sharp_kernel_at_origin() {
        for n in [1usize, 5, 16] {
            let v = kernel_phi(1, n as f64, &FilterSpec::sharp(), &[0.0]);
            assert!((v - (2 * n - 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_at_pi_matches_alternating_sum() {
        let h = FilterSpec::quintic();
        let oracle: f64 = (-8i32..=8)
            .map(|k| h.eval(k as f64 / 8.0) * if k % 2 == 0 { 1.0 } else { -1.0 })
            .sum();
        assert!((kernel_phi(1, 8.0, &h, &[PI]) - oracle).abs() < 1e-12);
    }

    #[test]
    fn sigma_reproduces_low_exponential() {
        let data = TorusSamples::grid(1, 32, |x| Complex64::from_polar(1.0, 2.0 * x[0]));
        let probes: Vec<Vec<f64>> = (0..100).map(|i| vec![0.0627 * i as f64]).collect();
        let out = sigma_n(&data, &FilterSpec::quintic(), 8.0, &probes).unwrap();
        for (x, v) in probes.iter().zip(&out) {
            assert!((v - Complex64::from_polar(1.0, 2.0 * x[0])).norm() < 1e-10);
        }
    }

    #[test]
    fn sigma_requires_weights() {
        let s = TorusSamples::from_real(1, vec![vec![0.0]], &[1.0], None).unwrap();
        assert_eq!(
            sigma_n(&s, &FilterSpec::quintic(), 4.0, &[vec![0.0]]).unwrap_err(),
            Error::MissingWeights
        );
        let empty = TorusSamples::from_real(1, vec![], &[], None).unwrap();
        assert_eq!(
            monte_carlo_sigma(&empty, &FilterSpec::quintic(), 4.0, &[vec![0.0]]).unwrap_err(),
            Error::EmptyData
        );
    }

    #[test]
    fn direct_and_coefficient_forms_agree() {
        let data = TorusSamples::grid(2, 12, |x| Complex64::new((x[0] - x[1]).sin().exp(), 0.0));
        let probes = vec![vec![0.3, 1.1], vec![4.0, 5.5]];
        let h = FilterSpec::quintic();
        let a = sigma_n(&data, &h, 5.0, &probes).unwrap();
        let b = sigma_n_direct(&data, &h, 5.0, &probes).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).norm() < 1e-11);
        }
    }

    #[test]
    fn tau_kills_low_and_edge_frequencies() {
        let h = FilterSpec::quintic();
        let probes: Vec<Vec<f64>> = (0..20).map(|i| vec![0.31 * i as f64]).collect();
        // |k| <= 2^{j-2}
        let fam = DyadicGrid::new(1, |x: &[f64]| Complex64::from_polar(1.0, 4.0 * x[0]));
        for v in tau_j(&fam, &h, 4, &probes).unwrap() {
            assert!(v.norm() < 1e-10);
        }
        // |k| = 2^j
        let fam = DyadicGrid::new(1, |x: &[f64]| Complex64::from_polar(1.0, 16.0 * x[0]));
        for v in tau_j(&fam, &h, 4, &probes).unwrap() {
            assert!(v.norm() < 1e-10);
        }
    }

    #[test]
    fn wavelet_level_zero_is_sigma_one() {
        let h = FilterSpec::quintic();
        let fam = DyadicGrid::new(1, real(|x| (x.sin()).exp()));
        let probes: Vec<Vec<f64>> = (0..10).map(|i| vec![0.6 * i as f64]).collect();
        let w = wavelet_expand(&fam, &h, 0, &probes).unwrap();
        let s = sigma_n(&fam.rule(1.0).unwrap(), &h, 1.0, &probes).unwrap();
        for (a, b) in w.iter().zip(&s) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn wavelet_level_matches_kernel_sum() {
        let h = FilterSpec::quintic();
        let fam = DyadicGrid::new(1, real(|x| x.cos().abs().powf(0.25)));
        let probes: Vec<Vec<f64>> = (0..12).map(|i| vec![0.5 * i as f64]).collect();
        for j in [0, 3] {
            let direct = wavelet_level_direct(&fam, &h, j, &probes).unwrap();
            let fast = wavelet_level(&fam, &h, j, &probes).unwrap();
            for (a, b) in direct.iter().zip(&fast) {
                assert!((a - b).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn polynomial_has_infinite_smoothness() {
        let h = FilterSpec::quintic();
        let fam = DyadicGrid::new(1, real(|x| (8.0 * x).cos() + (3.0 * x).sin()));
        let g = local_smoothness(&fam, &h, &[1.0], 0.3, 5..=8).unwrap();
        assert!(g.is_infinite());
        assert!(local_smoothness(&fam, &h, &[1.0], 0.3, 5..=7).is_err());
    }

    #[test]
    fn singular_function_favours_filtered_sums() {
        let report = singularity_experiment(&SingularityConfig::default()).unwrap();
        for row in &report.rows {
            let p = row.projection.percent_within(1e-4);
            let s = row.filtered.percent_within(1e-4);
            eprintln!("n={} partial={p:.2}% filtered={s:.2}%", row.degree);
            assert!(s > 5.0 * p.max(1.0));
        }
    }
}
