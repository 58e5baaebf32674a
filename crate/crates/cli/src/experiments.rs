//! Config-driven experiments shared by the binary and the acceptance suite.

use std::f64::consts::PI;

use locapprox::manifold::{self, RateConfig, RateReport};
use locapprox::masc::{
    self, EtaChoice, LevelSummary, MascConfig, MetricCloud, Oracle, PsiKernel, Refinement,
};
use locapprox::quadrature::{self, PointCloud, QuadratureRule};
use locapprox::rng;
use locapprox::sphere::{self, HarmonicBasis2};
use locapprox::sphere_approx::{
    self, ApproxModel, BenchmarkConfig, BenchmarkReport, FitOptions, THRESHOLD_EXPONENTS,
};
use locapprox::torus::{self, SingularityConfig, SingularityReport, TorusSamples};
use locapprox::zonal::{self, ZonalMask, ZonalRateConfig, ZonalRateReport};
use locapprox::{FilterKind, FilterSpec};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Subcommand that owns an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Module {
    Torus,
    Quad,
    Sphere,
    Manifold,
    Zonal,
    Masc,
}

impl std::fmt::Display for Module {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Module::Torus => "torus",
            Module::Quad => "quad",
            Module::Sphere => "sphere",
            Module::Manifold => "manifold",
            Module::Zonal => "zonal",
            Module::Masc => "masc",
        };
        f.write_str(name)
    }
}

/// One experiment together with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum Experiment {
    Fig4(SingularityConfig),
    TorusReproduction(TorusReproductionConfig),
    SphereReproduction(SphereReproductionConfig),
    Quadrature(QuadratureConfig),
    Table2(BenchmarkRuns),
    Remark79(BenchmarkRuns),
    ManifoldRate(ManifoldRateConfig),
    ZonalReproduction(ZonalReproductionConfig),
    ZonalRate(ZonalRateRuns),
    ThreeMoons(MoonsConfig),
    CircleEllipse(CircleEllipseConfig),
    #[serde(rename = "example10_1")]
    Mixture(MixtureConfig),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Fig4(_) => "fig4",
            Experiment::TorusReproduction(_) => "torus_reproduction",
            Experiment::SphereReproduction(_) => "sphere_reproduction",
            Experiment::Quadrature(_) => "quadrature",
            Experiment::Table2(_) => "table2",
            Experiment::Remark79(_) => "remark79",
            Experiment::ManifoldRate(_) => "manifold_rate",
            Experiment::ZonalReproduction(_) => "zonal_reproduction",
            Experiment::ZonalRate(_) => "zonal_rate",
            Experiment::ThreeMoons(_) => "three_moons",
            Experiment::CircleEllipse(_) => "circle_ellipse",
            Experiment::Mixture(_) => "example10_1",
        }
    }

    pub fn module(&self) -> Module {
        match self {
            Experiment::Fig4(_) | Experiment::TorusReproduction(_) => Module::Torus,
            Experiment::Quadrature(_) => Module::Quad,
            Experiment::SphereReproduction(_) | Experiment::Table2(_) | Experiment::Remark79(_) => {
                Module::Sphere
            }
            Experiment::ManifoldRate(_) => Module::Manifold,
            Experiment::ZonalReproduction(_) | Experiment::ZonalRate(_) => Module::Zonal,
            Experiment::ThreeMoons(_) | Experiment::CircleEllipse(_) | Experiment::Mixture(_) => {
                Module::Masc
            }
        }
    }

    /// Experiment run when a module subcommand is given no config.
    pub fn default_for(module: Module) -> Self {
        match module {
            Module::Torus => Experiment::Fig4(SingularityConfig::default()),
            Module::Quad => Experiment::Quadrature(QuadratureConfig::default()),
            Module::Sphere => Experiment::Table2(BenchmarkRuns::default()),
            Module::Manifold => Experiment::ManifoldRate(ManifoldRateConfig::default()),
            Module::Zonal => Experiment::ZonalRate(ZonalRateRuns::default()),
            Module::Masc => Experiment::ThreeMoons(MoonsConfig::default()),
        }
    }

    pub fn run(&self, seed: u64) -> Result<Results, CliError> {
        let module = self.module();
        let wrap = |e: locapprox::Error| CliError::Module {
            module,
            source: e,
        };
        Ok(match self {
            Experiment::Fig4(c) => Results::Fig4(torus::singularity_experiment(c).map_err(wrap)?),
            Experiment::TorusReproduction(c) => {
                Results::Reproduction(torus_reproduction(c, seed).map_err(wrap)?)
            }
            Experiment::SphereReproduction(c) => {
                Results::Reproduction(sphere_reproduction(c, seed).map_err(wrap)?)
            }
            Experiment::Quadrature(c) => Results::Quadrature(quadrature_exactness(c, seed).map_err(wrap)?),
            Experiment::Table2(c) => {
                Results::Benchmark(c.run(seed, sphere_approx::benchmark_table2).map_err(wrap)?)
            }
            Experiment::Remark79(c) => {
                Results::Benchmark(c.run(seed, sphere_approx::example_remark79).map_err(wrap)?)
            }
            Experiment::ManifoldRate(c) => Results::ManifoldRate(c.run(seed).map_err(wrap)?),
            Experiment::ZonalReproduction(c) => {
                Results::ZonalReproduction(zonal_reproduction(c, seed).map_err(wrap)?)
            }
            Experiment::ZonalRate(c) => Results::ZonalRate(c.run(seed).map_err(wrap)?),
            Experiment::ThreeMoons(c) => Results::Masc(c.run(seed).map_err(wrap)?),
            Experiment::CircleEllipse(c) => Results::Masc(c.run(seed).map_err(wrap)?),
            Experiment::Mixture(c) => Results::Mixture(c.run(seed).map_err(wrap)?),
        })
    }
}

/// Numeric output of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Results {
    Fig4(SingularityReport),
    Reproduction(ReproductionReport),
    Quadrature(QuadratureReport),
    Benchmark(BenchmarkSummary),
    ManifoldRate(ManifoldRateSummary),
    ZonalReproduction(ReproductionReport),
    ZonalRate(ZonalRateSummary),
    Masc(MascSummary),
    Mixture(MixtureSummary),
}

fn seeds(seed: u64, runs: usize) -> impl Iterator<Item = u64> {
    (0..runs.max(1) as u64).map(move |k| seed.wrapping_add(k))
}

fn sup_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

// ---------------------------------------------------------------- reproduction

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TorusReproductionConfig {
    pub n: usize,
    pub polynomials: usize,
    pub probes: usize,
    pub filter: FilterKind,
}

impl Default for TorusReproductionConfig {
    fn default() -> Self {
        Self {
            n: 32,
            polynomials: 100,
            probes: 256,
            filter: FilterKind::Quintic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproductionReport {
    pub degree: usize,
    pub polynomials: usize,
    pub sup_errors: Vec<f64>,
    pub max_error: f64,
}

impl ReproductionReport {
    fn new(degree: usize, sup_errors: Vec<f64>) -> Self {
        let max_error = sup_errors.iter().cloned().fold(0.0, f64::max);
        Self {
            degree,
            polynomials: sup_errors.len(),
            sup_errors,
            max_error,
        }
    }
}

/// `sigma_n` on the `2n`-point grid applied to random real trigonometric
/// polynomials of degree `n/2 - 1`.
pub fn torus_reproduction(c: &TorusReproductionConfig, seed: u64) -> locapprox::Result<ReproductionReport> {
    let degree = (c.n / 2).saturating_sub(1);
    let filter = FilterSpec::new(c.filter);
    let mut r = rng::stream(seed, "torus-reproduction");
    let probes: Vec<Vec<f64>> = (0..c.probes).map(|_| vec![r.random_range(0.0..2.0 * PI)]).collect();
    let mut errors = Vec::with_capacity(c.polynomials);
    for _ in 0..c.polynomials {
        let coeffs: Vec<(f64, f64)> = (0..=degree)
            .map(|_| (r.sample(StandardNormal), r.sample(StandardNormal)))
            .collect();
        let p = |x: f64| -> f64 {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, (a, b))| a * (k as f64 * x).cos() + b * (k as f64 * x).sin())
                .sum()
        };
        let data = TorusSamples::grid(1, 2 * c.n, |x| Complex64::new(p(x[0]), 0.0));
        let approx = torus::sigma_n(&data, &filter, c.n as f64, &probes)?;
        let truth: Vec<f64> = probes.iter().map(|x| p(x[0])).collect();
        let re: Vec<f64> = approx.iter().map(|v| v.re).collect();
        errors.push(sup_abs_diff(&re, &truth));
    }
    Ok(ReproductionReport::new(degree, errors))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SphereReproductionConfig {
    pub n: usize,
    pub polynomials: usize,
    pub probes: usize,
    pub filter: FilterKind,
}

impl Default for SphereReproductionConfig {
    fn default() -> Self {
        Self {
            n: 16,
            polynomials: 100,
            probes: 256,
            filter: FilterKind::Quintic,
        }
    }
}

/// Random spherical polynomial of degree `< degree` in harmonic coordinates.
pub fn random_harmonic_coeffs<R: Rng>(degree: usize, r: &mut R) -> Vec<f64> {
    (0..degree * degree).map(|_| r.sample(StandardNormal)).collect()
}

pub fn eval_harmonic(basis: &HarmonicBasis2, coeffs: &[f64], x: &[f64]) -> f64 {
    let mut row = vec![0.0; basis.dim()];
    basis.eval_all(x, &mut row);
    row.iter().zip(coeffs).map(|(a, b)| a * b).sum()
}

/// Filtered expansion on `S^2` from a product rule exact through degree
/// `2n`, applied to random polynomials of degree `n/2 - 1`.
pub fn sphere_reproduction(c: &SphereReproductionConfig, seed: u64) -> locapprox::Result<ReproductionReport> {
    let degree = (c.n / 2).saturating_sub(1);
    let filter = FilterSpec::new(c.filter);
    let rule = QuadratureRule::product_s2(2 * c.n + 1)?;
    let basis = HarmonicBasis2::new(degree + 1);
    let mut r = rng::stream(seed, "sphere-reproduction");
    let probes: Vec<Vec<f64>> = sphere::uniform_points(2, c.probes, &mut r)
        .into_iter()
        .map(|p| p.into_inner())
        .collect();
    let mut errors = Vec::with_capacity(c.polynomials);
    for _ in 0..c.polynomials {
        let coeffs = random_harmonic_coeffs(degree + 1, &mut r);
        let values: Vec<f64> = rule
            .cloud
            .points()
            .iter()
            .map(|x| eval_harmonic(&basis, &coeffs, x))
            .collect();
        let raw = sphere_approx::quadrature_coeffs(&rule, &values, c.n)?;
        let model = ApproxModel::from_raw("sigma", c.n, filter.clone(), &raw)?;
        let approx = model.eval_many(&probes);
        let truth: Vec<f64> = probes.iter().map(|x| eval_harmonic(&basis, &coeffs, x)).collect();
        errors.push(sup_abs_diff(&approx, &truth));
    }
    Ok(ReproductionReport::new(degree, errors))
}

// ------------------------------------------------------------------ quadrature

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub points: usize,
    pub order: usize,
    pub polynomials: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            points: 4096,
            order: 16,
            polynomials: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureReport {
    pub points: usize,
    pub order: usize,
    pub moment_residual: f64,
    pub min_weight: f64,
    pub max_weight: f64,
    pub integration_errors: Vec<f64>,
    pub max_integration_error: f64,
}

/// Weights on uniform random points of `S^2`, checked on random
/// polynomials of degree `< order` whose mean is their constant coefficient.
pub fn quadrature_exactness(c: &QuadratureConfig, seed: u64) -> locapprox::Result<QuadratureReport> {
    let mut r = rng::stream(seed, "quadrature-points");
    let points = sphere::uniform_points(2, c.points, &mut r);
    let cloud = PointCloud::from_sphere_points(2, &points)?;
    let rule = quadrature::solve_weights(&cloud, c.order)?;
    let basis = HarmonicBasis2::new(c.order);
    let mut r = rng::stream(seed, "quadrature-polynomials");
    let integration_errors: Vec<f64> = (0..c.polynomials)
        .map(|_| {
            let coeffs = random_harmonic_coeffs(c.order, &mut r);
            (rule.integrate(|x| eval_harmonic(&basis, &coeffs, x)) - coeffs[0]).abs()
        })
        .collect();
    let max_integration_error = integration_errors.iter().cloned().fold(0.0, f64::max);
    Ok(QuadratureReport {
        points: c.points,
        order: c.order,
        moment_residual: rule.moment_residual,
        min_weight: rule.weights.iter().cloned().fold(f64::INFINITY, f64::min),
        max_weight: rule.weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        integration_errors,
        max_integration_error,
    })
}

// ------------------------------------------------------------ sphere benchmarks

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkRuns {
    pub runs: usize,
    pub degree: usize,
    pub train: usize,
    pub test: usize,
    /// Defaults to `ceil(3 degree / 2)`.
    pub quadrature_order: Option<usize>,
}

impl Default for BenchmarkRuns {
    fn default() -> Self {
        Self {
            runs: 3,
            degree: 64,
            train: 65_536,
            test: 20_000,
            quadrature_order: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSummary {
    /// Threshold exponents `x` of the columns `10^{-x}`.
    pub exponents: Vec<i32>,
    pub methods: Vec<String>,
    /// `table[method][threshold]`: percentage of test points below the
    /// threshold, averaged over runs.
    pub table: Vec<Vec<f64>>,
    pub runs: Vec<BenchmarkReport>,
}

impl BenchmarkSummary {
    pub fn mean(&self, method: &str, exponent: i32) -> Option<f64> {
        let i = self.methods.iter().position(|m| m == method)?;
        let j = self.exponents.iter().position(|&e| e == exponent)?;
        Some(self.table[i][j])
    }
}

impl BenchmarkRuns {
    fn run(
        &self,
        seed: u64,
        experiment: fn(u64, &BenchmarkConfig) -> locapprox::Result<BenchmarkReport>,
    ) -> locapprox::Result<BenchmarkSummary> {
        let mut fit = FitOptions::for_degree(self.degree);
        if let Some(order) = self.quadrature_order {
            fit.quadrature_order = order;
        }
        let config = BenchmarkConfig {
            degree: self.degree,
            train: self.train,
            test: self.test,
            fit,
            sample_mean_rows: false,
        };
        let runs = seeds(seed, self.runs)
            .map(|s| experiment(s, &config))
            .collect::<locapprox::Result<Vec<_>>>()?;
        let methods: Vec<String> = runs[0].rows.iter().map(|r| r.label.clone()).collect();
        let exponents = THRESHOLD_EXPONENTS.to_vec();
        let table = methods
            .iter()
            .map(|m| {
                exponents
                    .iter()
                    .map(|&e| {
                        let vals: Vec<f64> = runs
                            .iter()
                            .filter_map(|r| r.row(m).and_then(|row| row.at(e)))
                            .collect();
                        if vals.is_empty() {
                            f64::NAN
                        } else {
                            vals.iter().sum::<f64>() / vals.len() as f64
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(BenchmarkSummary {
            exponents,
            methods,
            table,
            runs,
        })
    }
}

// -------------------------------------------------------------------- manifold

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ManifoldRateConfig {
    pub runs: usize,
    /// Parameter of the Poisson-kernel target.
    pub radius: f64,
    pub rate: RateConfig,
}

impl Default for ManifoldRateConfig {
    fn default() -> Self {
        Self {
            runs: 1,
            radius: 0.85,
            rate: RateConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldRateSummary {
    pub runs: Vec<RateReport>,
}

impl ManifoldRateConfig {
    fn run(&self, seed: u64) -> locapprox::Result<ManifoldRateSummary> {
        let target = manifold::poisson_target(self.radius);
        let runs = seeds(seed, self.runs)
            .map(|s| manifold::rate_experiment(target, &self.rate, s))
            .collect::<locapprox::Result<Vec<_>>>()?;
        Ok(ManifoldRateSummary { runs })
    }
}

// ----------------------------------------------------------------------- zonal

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ZonalReproductionConfig {
    pub gamma: f64,
    /// Polynomials have degree `< degree`.
    pub degree: usize,
    pub polynomials: usize,
    pub probes: usize,
    /// Gauss-Jacobi nodes of the integral oracle.
    pub nodes: usize,
}

impl Default for ZonalReproductionConfig {
    fn default() -> Self {
        Self {
            gamma: 0.0,
            degree: 8,
            polynomials: 20,
            probes: 20,
            nodes: 16,
        }
    }
}

/// Random even `P` of degree `< degree`, pulled back by the inverse
/// transform and pushed forward by the `|x.y|^{2 gamma + 1}` integral.
pub fn zonal_reproduction(c: &ZonalReproductionConfig, seed: u64) -> locapprox::Result<ReproductionReport> {
    let mask = ZonalMask::build(c.gamma, 2, c.degree)?;
    let basis = HarmonicBasis2::new(c.degree);
    let mut r = rng::stream(seed, "zonal-reproduction");
    let probes: Vec<Vec<f64>> = sphere::uniform_points(2, c.probes, &mut r)
        .into_iter()
        .map(|p| p.into_inner())
        .collect();
    let mut errors = Vec::with_capacity(c.polynomials);
    for _ in 0..c.polynomials {
        let mut coeffs = random_harmonic_coeffs(c.degree, &mut r);
        for (i, v) in coeffs.iter_mut().enumerate() {
            if HarmonicBasis2::degree_of(i) % 2 == 1 {
                *v = 0.0;
            }
        }
        let preimage = mask.invert_harmonic_coeffs(&coeffs)?;
        let g = |y: &[f64]| eval_harmonic(&basis, &preimage, y);
        let mut err: f64 = 0.0;
        for x in &probes {
            let v = zonal::kernel_integral_s2(mask.exponent(), g, x, c.nodes)?;
            err = err.max((v - eval_harmonic(&basis, &coeffs, x)).abs());
        }
        errors.push(err);
    }
    Ok(ReproductionReport::new(c.degree.saturating_sub(1), errors))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ZonalRateRuns {
    pub runs: usize,
    pub rate: ZonalRateConfig,
}

impl Default for ZonalRateRuns {
    fn default() -> Self {
        Self {
            runs: 1,
            rate: ZonalRateConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZonalRateSummary {
    /// Predicted dyadic error ratio `2^{-2(gamma + 1)}`.
    pub predicted_ratio: f64,
    pub runs: Vec<ZonalRateReport>,
}

impl ZonalRateRuns {
    fn run(&self, seed: u64) -> locapprox::Result<ZonalRateSummary> {
        let runs = seeds(seed, self.runs)
            .map(|s| zonal::rate_experiment(|x: &[f64]| x[2].cosh(), &self.rate, s))
            .collect::<locapprox::Result<Vec<_>>>()?;
        Ok(ZonalRateSummary {
            predicted_ratio: 2f64.powf(-2.0 * (self.rate.gamma + 1.0)),
            runs,
        })
    }
}

// ------------------------------------------------------------------------ masc

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MascSummary {
    pub points: Vec<Vec<f64>>,
    pub truth: Vec<usize>,
    pub labels: Vec<Option<usize>>,
    pub queried: Vec<usize>,
    pub clusters: usize,
    pub queries: usize,
    pub accuracy: f64,
    pub levels: Vec<LevelSummary>,
}

fn run_masc(data: masc::LabeledData, cloud: MetricCloud, config: &MascConfig) -> locapprox::Result<MascSummary> {
    let mut oracle = Oracle::from_labels(&data.labels);
    let res = masc::masc_pipeline(&cloud, &mut oracle, config)?;
    let accuracy = res.accuracy(&data.labels);
    Ok(MascSummary {
        points: data.points.clone(),
        truth: data.labels.clone(),
        labels: res.labels,
        queried: res.queried,
        clusters: res.clusters,
        queries: res.queries,
        accuracy,
        levels: res.levels,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MoonsConfig {
    pub per_class: usize,
    pub noise: f64,
    pub masc: MascConfig,
}

impl Default for MoonsConfig {
    fn default() -> Self {
        Self {
            per_class: 500,
            noise: 0.05,
            masc: MascConfig {
                theta: 0.1,
                eta: EtaChoice::Auto { factor: 8.0 },
                ..MascConfig::default()
            },
        }
    }
}

impl MoonsConfig {
    fn run(&self, seed: u64) -> locapprox::Result<MascSummary> {
        let data = masc::three_moons(self.per_class, self.noise, seed);
        let cloud = MetricCloud::euclidean(data.points.clone())?;
        run_masc(data, cloud, &self.masc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CircleEllipseConfig {
    pub per_class: usize,
    pub major: f64,
    pub eccentricity: f64,
    pub noise: f64,
    pub masc: MascConfig,
}

impl Default for CircleEllipseConfig {
    fn default() -> Self {
        Self {
            per_class: 1000,
            major: 1.4,
            eccentricity: 0.79,
            noise: 0.05,
            masc: MascConfig {
                theta: 0.1,
                eta: EtaChoice::Auto { factor: 8.0 },
                budget: 40,
                refinement: Some(Refinement::default()),
                ..MascConfig::default()
            },
        }
    }
}

impl CircleEllipseConfig {
    fn run(&self, seed: u64) -> locapprox::Result<MascSummary> {
        let data = masc::circle_ellipse(self.per_class, self.major, self.eccentricity, self.noise, seed);
        let cloud = MetricCloud::euclidean(data.points.clone())?;
        run_masc(data, cloud, &self.masc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MixtureConfig {
    /// Degree of the support estimator whose local maxima are reported.
    pub n: usize,
    /// Evaluation grid on the circle.
    pub grid: usize,
    /// Threshold of the support-coverage check.
    pub theta: f64,
    pub masc: MascConfig,
}

impl Default for MixtureConfig {
    fn default() -> Self {
        Self {
            n: 128,
            grid: 4096,
            theta: 0.01,
            masc: MascConfig {
                n: Some(128),
                theta: 0.3,
                eta: EtaChoice::Fixed(0.02),
                ..MascConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSummary {
    pub grid: Vec<f64>,
    pub estimate: Vec<f64>,
    pub local_maxima: Vec<f64>,
    /// Distance from each atom to the nearest local maximum.
    pub atom_offsets: Vec<f64>,
    /// Kept points per mixture component at the coverage threshold.
    pub kept_per_component: Vec<usize>,
    pub component_sizes: Vec<usize>,
    pub masc: MascSummary,
}

impl MixtureConfig {
    fn run(&self, seed: u64) -> locapprox::Result<MixtureSummary> {
        let data = masc::atomic_mixture(seed);
        let cloud = MetricCloud::torus(data.points.clone())?;
        let filter = self.masc.filter.clone();
        let kernel = PsiKernel::new(self.n, &filter, self.masc.form)?;
        let grid: Vec<f64> = (0..self.grid)
            .map(|k| -PI + 2.0 * PI * k as f64 / self.grid as f64)
            .collect();
        let probes: Vec<Vec<f64>> = grid.iter().map(|&x| vec![x]).collect();
        let est = masc::support_estimate(&cloud, &kernel, &filter, &probes)?;
        let local_maxima: Vec<f64> = masc::periodic_local_maxima(&est.at_probes)
            .into_iter()
            .map(|i| grid[i])
            .collect();
        let atom_offsets = masc::MIXTURE_ATOMS
            .iter()
            .map(|&a| {
                local_maxima
                    .iter()
                    .map(|&m| torus::wrapped_diff(m, a).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let kept = masc::threshold_set(&est, self.theta)?;
        let components = data.labels.iter().max().map_or(0, |m| m + 1);
        let mut kept_per_component = vec![0; components];
        for &i in &kept {
            kept_per_component[data.labels[i]] += 1;
        }
        let mut component_sizes = vec![0; components];
        for &l in &data.labels {
            component_sizes[l] += 1;
        }
        let masc = run_masc(data, cloud, &self.masc)?;
        Ok(MixtureSummary {
            grid,
            estimate: est.at_probes,
            local_maxima,
            atom_offsets,
            kept_per_component,
            component_sizes,
            masc,
        })
    }
}

impl Results {
    /// Human-readable headline numbers.
    pub fn summary(&self) -> Vec<String> {
        match self {
            Results::Fig4(r) => r
                .rows
                .iter()
                .map(|row| {
                    format!(
                        "n={}: error <= 1e-4 at {:.2}% (partial sum) vs {:.2}% (filtered)",
                        row.degree,
                        row.projection.percent_within(1e-4),
                        row.filtered.percent_within(1e-4)
                    )
                })
                .collect(),
            Results::Reproduction(r) | Results::ZonalReproduction(r) => vec![format!(
                "degree {}: max sup error {:.3e} over {} polynomials",
                r.degree, r.max_error, r.polynomials
            )],
            Results::Quadrature(r) => vec![format!(
                "{} points, order {}: moment residual {:.3e}, max integration error {:.3e}",
                r.points, r.order, r.moment_residual, r.max_integration_error
            )],
            Results::Benchmark(b) => {
                let mut out = vec![format!(
                    "method {}",
                    b.exponents.iter().map(|e| format!("{:>8}", format!("1e-{e}"))).collect::<String>()
                )];
                for (m, row) in b.methods.iter().zip(&b.table) {
                    out.push(format!(
                        "{m:<6} {}",
                        row.iter().map(|v| format!("{v:>8.2}")).collect::<String>()
                    ));
                }
                out
            }
            Results::ManifoldRate(s) => s
                .runs
                .iter()
                .map(|r| {
                    let errs: Vec<String> = r
                        .rows
                        .iter()
                        .map(|row| format!("n={} M={} err={:.3e} dens={:.3e}", row.degree, row.samples, row.sup_error, row.density_error))
                        .collect();
                    format!("seed {}: {}", r.seed, errs.join("; "))
                })
                .collect(),
            Results::ZonalRate(s) => s
                .runs
                .iter()
                .map(|r| {
                    format!(
                        "seed {}: errors {:?}, ratios {:?} (predicted {:.4})",
                        r.seed,
                        r.rows.iter().map(|x| format!("{:.3e}", x.sup_error)).collect::<Vec<_>>(),
                        r.ratios.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>(),
                        s.predicted_ratio
                    )
                })
                .collect(),
            Results::Masc(m) => vec![format!(
                "{} clusters, {} queries, accuracy {:.2}%",
                m.clusters,
                m.queries,
                100.0 * m.accuracy
            )],
            Results::Mixture(m) => vec![
                format!("local maxima offsets from atoms: {:?}", m.atom_offsets),
                format!("kept per component {:?} of {:?}", m.kept_per_component, m.component_sizes),
                format!(
                    "masc: {} clusters, {} queries, accuracy {:.2}%",
                    m.masc.clusters,
                    m.masc.queries,
                    100.0 * m.masc.accuracy
                ),
            ],
        }
    }
}
