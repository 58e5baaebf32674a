//! Polynomial approximation on `S^2` from random samples, and the
//! error-percentile harness comparing the methods.
//!
//! Every method produces harmonic coefficients of degree `< n`. They differ in
//! how raw coefficients are estimated (least squares, plain sample means, or
//! a quadrature rule built on the samples) and in the filter applied to them
//! afterwards (sharp cutoff or quintic).

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::FilterSpec;
use crate::quadrature::{self, Design, PointCloud, QuadratureRule};
use crate::rng;
use crate::sphere::{self, HarmonicBasis2, SpherePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ApproxMethod {
    #[serde(rename = "LS")]
    Ls,
    #[serde(rename = "MS1")]
    Ms1,
    #[serde(rename = "QS1")]
    Qs1,
    #[serde(rename = "MS5")]
    Ms5,
    #[serde(rename = "QS5")]
    Qs5,
}

impl ApproxMethod {
    pub const ALL: [ApproxMethod; 5] = [
        ApproxMethod::Ls,
        ApproxMethod::Ms1,
        ApproxMethod::Qs1,
        ApproxMethod::Ms5,
        ApproxMethod::Qs5,
    ];

    pub fn filter(self) -> FilterSpec {
        match self {
            ApproxMethod::Ms5 | ApproxMethod::Qs5 => FilterSpec::quintic(),
            _ => FilterSpec::sharp(),
        }
    }

    pub fn is_quadrature(self) -> bool {
        matches!(self, ApproxMethod::Qs1 | ApproxMethod::Qs5)
    }
}

impl fmt::Display for ApproxMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ApproxMethod::Ls => "LS",
            ApproxMethod::Ms1 => "MS1",
            ApproxMethod::Qs1 => "QS1",
            ApproxMethod::Ms5 => "MS5",
            ApproxMethod::Qs5 => "QS5",
        })
    }
}

/// How the sampling-based (`MS*`) methods estimate raw coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SampleEstimator {
    /// Discrete least squares on the sample.
    #[default]
    LeastSquares,
    /// `(1/M) sum_j y_j Y(x_j)`.
    SampleMean,
}

/// Filtered harmonic expansion of degree `< n` on `S^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxModel {
    pub label: String,
    pub degree: usize,
    pub filter: FilterSpec,
    pub coeffs: Vec<f64>,
}

impl ApproxModel {
    /// Applies `h(l / n)` to raw coefficients of degree `< n`.
    pub fn from_raw(label: impl Into<String>, degree: usize, filter: FilterSpec, raw: &[f64]) -> Result<Self> {
        if raw.len() != degree * degree {
            return Err(Error::LengthMismatch {
                what: "raw coefficients",
                got: raw.len(),
                expected: degree * degree,
            });
        }
        let coeffs = raw
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let l = HarmonicBasis2::degree_of(i);
                c * filter.eval(l as f64 / degree as f64)
            })
            .collect();
        Ok(Self {
            label: label.into(),
            degree,
            filter,
            coeffs,
        })
    }

    pub fn eval(&self, basis: &HarmonicBasis2, x: &[f64]) -> f64 {
        let mut row = vec![0.0; basis.dim()];
        basis.eval_all(x, &mut row);
        row.iter().zip(&self.coeffs).map(|(a, b)| a * b).sum()
    }

    pub fn eval_many(&self, points: &[Vec<f64>]) -> Vec<f64> {
        let basis = HarmonicBasis2::new(self.degree);
        points
            .par_iter()
            .map_init(
                || vec![0.0; basis.dim()],
                |row, x| {
                    basis.eval_all(x, row);
                    row.iter().zip(&self.coeffs).map(|(a, b)| a * b).sum()
                },
            )
            .collect()
    }
}

fn check_samples(points: &[Vec<f64>], values: &[f64]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyData);
    }
    if points.len() != values.len() {
        return Err(Error::LengthMismatch {
            what: "values",
            got: values.len(),
            expected: points.len(),
        });
    }
    Ok(())
}

/// Unweighted discrete least-squares coefficients of degree `< n`.
pub fn least_squares_coeffs(points: &[Vec<f64>], values: &[f64], n: usize) -> Result<Vec<f64>> {
    check_samples(points, values)?;
    quadrature::discrete_least_squares(&HarmonicBasis2::new(n), points, values)
}

/// Sample-mean coefficients `(1/M) sum_j y_j Y(x_j)`.
pub fn sample_mean_coeffs(points: &[Vec<f64>], values: &[f64], n: usize) -> Result<Vec<f64>> {
    check_samples(points, values)?;
    let basis = HarmonicBasis2::new(n);
    let m = values.len() as f64;
    let scaled: Vec<f64> = values.iter().map(|v| v / m).collect();
    Ok(Design::new(&basis, points).apply(&scaled))
}

/// Coefficients `sum_j w_j y_j Y(x_j)` under a quadrature rule on the sample.
pub fn quadrature_coeffs(rule: &QuadratureRule, values: &[f64], n: usize) -> Result<Vec<f64>> {
    check_samples(rule.cloud.points(), values)?;
    let basis = HarmonicBasis2::new(n);
    let weighted: Vec<f64> = values.iter().zip(&rule.weights).map(|(v, w)| v * w).collect();
    Ok(Design::new(&basis, rule.cloud.points()).apply(&weighted))
}

/// Options shared by [`fit`] and the benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Exactness order of the quadrature rule used by `QS*`.
    pub quadrature_order: usize,
    pub sample_estimator: SampleEstimator,
}

impl FitOptions {
    /// Kernel sums `sum_j w_j f(x_j) Phi_n(x . x_j)` reproduce `Pi_{n/2}` once
    /// the rule is exact through degree `3n/2`.
    pub fn for_degree(n: usize) -> Self {
        Self {
            quadrature_order: (3 * n).div_ceil(2),
            sample_estimator: SampleEstimator::LeastSquares,
        }
    }
}

/// Fits one method to labeled points on `S^2`.
pub fn fit(
    method: ApproxMethod,
    points: &[Vec<f64>],
    values: &[f64],
    n: usize,
    options: &FitOptions,
) -> Result<ApproxModel> {
    let raw = match method {
        ApproxMethod::Ls => least_squares_coeffs(points, values, n)?,
        ApproxMethod::Ms1 | ApproxMethod::Ms5 => match options.sample_estimator {
            SampleEstimator::LeastSquares => least_squares_coeffs(points, values, n)?,
            SampleEstimator::SampleMean => sample_mean_coeffs(points, values, n)?,
        },
        ApproxMethod::Qs1 | ApproxMethod::Qs5 => {
            let cloud = PointCloud::sphere(2, points.to_vec())?;
            let rule = quadrature::solve_weights(&cloud, options.quadrature_order)?;
            quadrature_coeffs(&rule, values, n)?
        }
    };
    ApproxModel::from_raw(method.to_string(), n, method.filter(), &raw)
}

/// Exponents `x` of the thresholds `10^{-x}`.
pub const THRESHOLD_EXPONENTS: [i32; 9] = [2, 3, 4, 5, 6, 7, 8, 9, 10];

/// Percentage of test points with error below `10^{-x}` for each exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorHistogram {
    pub exponents: Vec<i32>,
    pub percent_below: Vec<f64>,
}

impl ErrorHistogram {
    pub fn from_errors(errors: &[f64], exponents: &[i32]) -> Self {
        let total = errors.len().max(1) as f64;
        let percent_below = exponents
            .iter()
            .map(|&x| {
                let t = 10f64.powi(-x);
                100.0 * errors.iter().filter(|e| **e < t).count() as f64 / total
            })
            .collect();
        Self {
            exponents: exponents.to_vec(),
            percent_below,
        }
    }

    /// Percentage at threshold `10^{-x}`.
    pub fn at(&self, x: i32) -> Option<f64> {
        self.exponents
            .iter()
            .position(|&e| e == x)
            .map(|i| self.percent_below[i])
    }
}

/// Error profile of a model against a reference function.
pub fn error_table(
    model: &ApproxModel,
    truth: impl Fn(&[f64]) -> f64 + Sync,
    test_points: &[Vec<f64>],
) -> ErrorHistogram {
    let approx = model.eval_many(test_points);
    let errors: Vec<f64> = test_points
        .par_iter()
        .zip(&approx)
        .map(|(x, a)| (a - truth(x)).abs())
        .collect();
    ErrorHistogram::from_errors(&errors, &THRESHOLD_EXPONENTS)
}

/// The benchmark function: a small `C^0` cap near the north pole on top of
/// an analytic exponential.
pub fn benchmark_target(x: &[f64]) -> f64 {
    let d = x[0] * x[0] + x[1] * x[1] + (x[2] - 1.02) * (x[2] - 1.02);
    (0.015 - d).max(0.0) + (0.9 * x[0] + 1.1 * x[1] + x[2]).exp()
}

/// Two caps with `5/6`-power singular boundaries.
pub fn remark_target(x: &[f64]) -> f64 {
    let p = |t: f64| if t > 0.0 { t.powf(5.0 / 6.0) } else { 0.0 };
    p(x[0] - 0.7) + p(x[2] - 0.7)
}

/// Protocol parameters of the sphere benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub degree: usize,
    pub train: usize,
    pub test: usize,
    pub fit: FitOptions,
    /// Also report the sample-mean variants of `MS1`/`MS5`.
    pub sample_mean_rows: bool,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            degree: 64,
            train: 65_536,
            test: 20_000,
            fit: FitOptions::for_degree(64),
            sample_mean_rows: true,
        }
    }
}

/// One row of a benchmark table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: String,
    /// `None` when the method could not be built (e.g. quadrature failure).
    pub histogram: Option<ErrorHistogram>,
    pub failure: Option<String>,
}

impl TableRow {
    fn ok(label: impl Into<String>, h: ErrorHistogram) -> Self {
        Self {
            label: label.into(),
            histogram: Some(h),
            failure: None,
        }
    }

    fn failed(label: impl Into<String>, e: &Error) -> Self {
        Self {
            label: label.into(),
            histogram: None,
            failure: Some(e.to_string()),
        }
    }

    pub fn at(&self, x: i32) -> Option<f64> {
        self.histogram.as_ref().and_then(|h| h.at(x))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub seed: u64,
    pub config: BenchmarkConfig,
    pub rows: Vec<TableRow>,
    pub quadrature_residual: Option<f64>,
}

impl BenchmarkReport {
    pub fn row(&self, label: &str) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}

/// Training and test samples of `target` at uniform random points.
pub fn draw_samples(
    seed: u64,
    train: usize,
    test: usize,
    target: impl Fn(&[f64]) -> f64,
) -> (Vec<Vec<f64>>, Vec<f64>, Vec<Vec<f64>>) {
    let mut r = rng::stream(seed, "sphere-train");
    let train_pts: Vec<Vec<f64>> = sphere::uniform_points(2, train, &mut r)
        .into_iter()
        .map(SpherePoint::into_inner)
        .collect();
    let values = train_pts.iter().map(|x| target(x)).collect();
    let mut r = rng::stream(seed, "sphere-test");
    let test_pts = sphere::uniform_points(2, test, &mut r)
        .into_iter()
        .map(SpherePoint::into_inner)
        .collect();
    (train_pts, values, test_pts)
}

/// Runs the five-method comparison on [`benchmark_target`].
pub fn benchmark_table2(seed: u64, config: &BenchmarkConfig) -> Result<BenchmarkReport> {
    run_comparison(seed, config, benchmark_target, &ApproxMethod::ALL)
}

/// Least squares against the quadrature-based localized reconstruction on
/// [`remark_target`].
pub fn example_remark79(seed: u64, config: &BenchmarkConfig) -> Result<BenchmarkReport> {
    let config = BenchmarkConfig {
        sample_mean_rows: false,
        ..*config
    };
    run_comparison(seed, &config, remark_target, &[ApproxMethod::Ls, ApproxMethod::Qs5])
}

fn run_comparison(
    seed: u64,
    config: &BenchmarkConfig,
    target: fn(&[f64]) -> f64,
    methods: &[ApproxMethod],
) -> Result<BenchmarkReport> {
    let n = config.degree;
    let (train, values, test) = draw_samples(seed, config.train, config.test, target);
    let mut rows = Vec::new();

    let needs_ls = methods.iter().any(|m| {
        matches!(m, ApproxMethod::Ls)
            || (matches!(m, ApproxMethod::Ms1 | ApproxMethod::Ms5)
                && config.fit.sample_estimator == SampleEstimator::LeastSquares)
    });
    let ls = if needs_ls {
        Some(least_squares_coeffs(&train, &values, n))
    } else {
        None
    };
    let mean = if config.sample_mean_rows
        || (config.fit.sample_estimator == SampleEstimator::SampleMean
            && methods.iter().any(|m| matches!(m, ApproxMethod::Ms1 | ApproxMethod::Ms5)))
    {
        Some(sample_mean_coeffs(&train, &values, n)?)
    } else {
        None
    };
    let mut quadrature_residual = None;
    let quad = if methods.iter().any(|m| m.is_quadrature()) {
        let cloud = PointCloud::sphere(2, train.clone())?;
        Some(
            quadrature::solve_weights(&cloud, config.fit.quadrature_order).and_then(|rule| {
                quadrature_residual = Some(rule.moment_residual);
                quadrature_coeffs(&rule, &values, n)
            }),
        )
    } else {
        None
    };

    let mut push = |label: String, filter: FilterSpec, raw: Option<&Result<Vec<f64>>>| {
        let raw = raw.expect("raw coefficients prepared for every requested method");
        match raw {
            Ok(c) => {
                let model = ApproxModel::from_raw(label.clone(), n, filter, c)?;
                rows.push(TableRow::ok(label, error_table(&model, target, &test)));
            }
            Err(e) => rows.push(TableRow::failed(label, e)),
        }
        Ok::<(), Error>(())
    };
    let mean_res = mean.map(Ok);
    for &m in methods {
        let raw = match m {
            ApproxMethod::Ls => ls.as_ref(),
            ApproxMethod::Ms1 | ApproxMethod::Ms5 => match config.fit.sample_estimator {
                SampleEstimator::LeastSquares => ls.as_ref(),
                SampleEstimator::SampleMean => mean_res.as_ref(),
            },
            ApproxMethod::Qs1 | ApproxMethod::Qs5 => quad.as_ref(),
        };
        push(m.to_string(), m.filter(), raw)?;
    }
    if config.sample_mean_rows {
        push("MS1-mean".into(), FilterSpec::sharp(), mean_res.as_ref())?;
        push("MS5-mean".into(), FilterSpec::quintic(), mean_res.as_ref())?;
    }
    Ok(BenchmarkReport {
        seed,
        config: *config,
        rows,
        quadrature_residual,
    })
}
