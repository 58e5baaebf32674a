//! Classification by support separation: a positive localized kernel
//! estimates the data support, thresholding and single-linkage clustering
//! split it into separated pieces, and one label query per piece labels
//! the whole piece.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::FilterSpec;
use crate::rng;

/// How the complex sum `sum_l h(l/n) e^{i l rho}` is turned into a real,
/// nonnegative kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiForm {
    /// `(sum_l h(l/n) cos(l rho))^2`.
    #[default]
    SquaredReal,
    /// `|sum_l h(l/n) e^{i l rho}|^2`.
    ModulusSquared,
}

/// The kernel `Psi_n(rho)` on distances `rho` in `[0, pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiKernel {
    n: usize,
    form: PsiForm,
    coeffs: Vec<f64>,
}

impl PsiKernel {
    pub fn new(n: usize, filter: &FilterSpec, form: PsiForm) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "kernel degree must be positive".into(),
            });
        }
        let coeffs = (0..=n).map(|l| filter.eval(l as f64 / n as f64)).collect();
        Ok(Self { n, form, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn form(&self) -> PsiForm {
        self.form
    }

    pub fn eval(&self, rho: f64) -> f64 {
        let x = rho.cos();
        let c = &self.coeffs;
        // Clenshaw for sum c_l T_l(x).
        let (mut b1, mut b2) = (0.0, 0.0);
        for &ck in c[1..].iter().rev() {
            let b0 = ck + 2.0 * x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        let cos_sum = c[0] + x * b1 - b2;
        match self.form {
            PsiForm::SquaredReal => cos_sum * cos_sum,
            PsiForm::ModulusSquared => {
                // sum_{l>=1} c_l sin(l rho) = sin(rho) sum_{j>=0} c_{j+1} U_j(x).
                let (mut b1, mut b2) = (0.0, 0.0);
                for &ck in c[1..].iter().rev() {
                    let b0 = ck + 2.0 * x * b1 - b2;
                    b2 = b1;
                    b1 = b0;
                }
                let sin_sum = rho.sin() * b1;
                cos_sum * cos_sum + sin_sum * sin_sum
            }
        }
    }
}

/// `Psi_n(rho)` for a single distance.
pub fn psi_kernel(n: usize, filter: &FilterSpec, rho: f64, form: PsiForm) -> Result<f64> {
    if !(0.0..=PI + 1e-12).contains(&rho) {
        return Err(Error::OutOfDomain(rho));
    }
    Ok(PsiKernel::new(n, filter, form)?.eval(rho))
}

/// Distance used on a [`MetricCloud`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Metric {
    /// Wrapped Euclidean distance on `[-pi, pi)^q`, divided by `sqrt(q)`.
    TorusGeodesic,
    /// Euclidean distance times `scale`.
    EuclideanRescaled { scale: f64 },
    /// Angle `2 asin(|x - y| / diameter)` of the chord on a sphere whose
    /// diameter equals the data diameter.
    Chordal { diameter: f64 },
}

/// Points with a metric whose diameter on the data is at most `pi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricCloud {
    points: Vec<Vec<f64>>,
    metric: Metric,
}

impl MetricCloud {
    /// Points on the torus `[-pi, pi)^q`.
    pub fn torus(points: Vec<Vec<f64>>) -> Result<Self> {
        Self::validated(points, Metric::TorusGeodesic)
    }

    /// Euclidean points rescaled by `pi / diameter`.
    pub fn euclidean(points: Vec<Vec<f64>>) -> Result<Self> {
        let diameter = diameter(&points);
        let scale = if diameter > 0.0 { PI / diameter } else { 1.0 };
        Self::validated(points, Metric::EuclideanRescaled { scale })
    }

    /// Euclidean points under the chordal angle metric.
    pub fn chordal(points: Vec<Vec<f64>>) -> Result<Self> {
        let diameter = diameter(&points).max(f64::MIN_POSITIVE);
        Self::validated(points, Metric::Chordal { diameter })
    }

    /// Points with an explicit metric, e.g. one fitted on other data.
    pub fn with_metric(points: Vec<Vec<f64>>, metric: Metric) -> Result<Self> {
        Self::validated(points, metric)
    }

    fn validated(points: Vec<Vec<f64>>, metric: Metric) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyData);
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "points",
                reason: "points need at least one coordinate".into(),
            });
        }
        if let Some(bad) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::LengthMismatch {
                what: "point",
                got: bad.len(),
                expected: dim,
            });
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "points",
                reason: "coordinates must be finite".into(),
            });
        }
        Ok(Self { points, metric })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    /// Metric distance between two arbitrary coordinate vectors.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let d = match self.metric {
            Metric::TorusGeodesic => {
                let s: f64 = a.iter().zip(b).map(|(x, y)| circle_gap(*x, *y).powi(2)).sum();
                (s / a.len() as f64).sqrt()
            }
            Metric::EuclideanRescaled { scale } => scale * euclid(a, b),
            Metric::Chordal { diameter } => 2.0 * (euclid(a, b) / diameter).min(1.0).asin(),
        };
        d.min(PI)
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.distance(&self.points[i], &self.points[j])
    }

    /// Restriction to the points `indices`, keeping the metric.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        Self::validated(indices.iter().map(|&i| self.points[i].clone()).collect(), self.metric)
    }

    /// Median over points of the distance to the nearest other point among
    /// `indices`.
    pub fn median_nn_distance(&self, indices: &[usize]) -> Option<f64> {
        if indices.len() < 2 {
            return None;
        }
        let mut nn: Vec<f64> = indices
            .par_iter()
            .map(|&i| {
                indices
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| self.dist(i, j))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        nn.sort_by(f64::total_cmp);
        Some(nn[nn.len() / 2])
    }
}

/// Arc distance between two angles; symmetric in its arguments bit for bit.
fn circle_gap(x: f64, y: f64) -> f64 {
    let d = (x - y).abs().rem_euclid(TAU);
    d.min(TAU - d)
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn diameter(points: &[Vec<f64>]) -> f64 {
    points
        .par_iter()
        .enumerate()
        .map(|(i, p)| points[i + 1..].iter().map(|q| euclid(p, q)).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max)
}

/// Values of `F_n(x) = (1/M) sum_j Psi_n(rho(x, x_j))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportEstimate {
    pub n: usize,
    pub filter: FilterSpec,
    pub at_samples: Vec<f64>,
    pub at_probes: Vec<f64>,
}

impl SupportEstimate {
    /// Largest value over the sample points.
    pub fn sample_max(&self) -> f64 {
        self.at_samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `F_n` over the samples of `cloud` and over `probes`.
pub fn support_estimate(
    cloud: &MetricCloud,
    kernel: &PsiKernel,
    filter: &FilterSpec,
    probes: &[Vec<f64>],
) -> Result<SupportEstimate> {
    if let Some(bad) = probes.iter().find(|p| p.len() != cloud.dim()) {
        return Err(Error::LengthMismatch {
            what: "probe",
            got: bad.len(),
            expected: cloud.dim(),
        });
    }
    let m = cloud.len() as f64;
    let at = |x: &[f64]| -> f64 {
        cloud
            .points()
            .iter()
            .map(|y| kernel.eval(cloud.distance(x, y)))
            .sum::<f64>()
            / m
    };
    let at_samples = cloud.points().par_iter().map(|x| at(x)).collect();
    let at_probes = probes.par_iter().map(|x| at(x)).collect();
    Ok(SupportEstimate {
        n: kernel.n(),
        filter: filter.clone(),
        at_samples,
        at_probes,
    })
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "theta",
            reason: format!("threshold must lie in (0, 1], got {theta}"),
        });
    }
    Ok(())
}

/// Sample indices with `F_n >= theta * max_k F_n(x_k)`.
pub fn threshold_set(est: &SupportEstimate, theta: f64) -> Result<Vec<usize>> {
    check_theta(theta)?;
    let cut = theta * est.sample_max();
    Ok((0..est.at_samples.len())
        .filter(|&i| est.at_samples[i] >= cut)
        .collect())
}

/// Probe indices passing the same test as [`threshold_set`].
pub fn threshold_probes(est: &SupportEstimate, theta: f64) -> Result<Vec<usize>> {
    check_theta(theta)?;
    let cut = theta * est.sample_max();
    Ok((0..est.at_probes.len())
        .filter(|&i| est.at_probes[i] >= cut)
        .collect())
}

/// Connected components of the kept points under links shorter than `eta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterPartition {
    pub eta: f64,
    pub kept: Vec<usize>,
    /// Sample indices of each cluster, ascending; clusters ordered by their
    /// smallest index.
    pub clusters: Vec<Vec<usize>>,
}

impl ClusterPartition {
    /// Smallest distance between points of different clusters.
    pub fn min_gap(&self, cloud: &MetricCloud) -> f64 {
        let mut owner = HashMap::new();
        for (c, members) in self.clusters.iter().enumerate() {
            for &i in members {
                owner.insert(i, c);
            }
        }
        self.kept
            .par_iter()
            .map(|&i| {
                self.kept
                    .iter()
                    .filter(|&&j| owner[&j] != owner[&i])
                    .map(|&j| cloud.dist(i, j))
                    .fold(f64::INFINITY, f64::min)
            })
            .reduce(|| f64::INFINITY, f64::min)
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Single-linkage clustering of `kept` at scale `eta`.
pub fn cluster(cloud: &MetricCloud, kept: &[usize], eta: f64) -> Result<ClusterPartition> {
    if !(eta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "eta",
            reason: format!("separation must be positive, got {eta}"),
        });
    }
    let mut kept = kept.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let links: Vec<(usize, usize)> = (0..kept.len())
        .into_par_iter()
        .flat_map_iter(|a| {
            let kept = &kept;
            (a + 1..kept.len())
                .filter(move |&b| cloud.dist(kept[a], kept[b]) < eta)
                .map(move |b| (a, b))
        })
        .collect();
    let mut uf = UnionFind::new(kept.len());
    for (a, b) in links {
        uf.union(a, b);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for a in 0..kept.len() {
        groups.entry(uf.find(a)).or_default().push(kept[a]);
    }
    let mut clusters: Vec<Vec<usize>> = groups.into_values().collect();
    clusters.sort_by_key(|c| c[0]);
    Ok(ClusterPartition { eta, kept, clusters })
}

/// Labels obtained by querying one point per cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPartition {
    pub partition: ClusterPartition,
    /// Label of each cluster; `None` when the budget ran out first.
    pub cluster_labels: Vec<Option<usize>>,
    /// Queried sample index per cluster.
    pub representatives: Vec<Option<usize>>,
    /// Label of every sample; `None` marks unlabeled points.
    pub labels: Vec<Option<usize>>,
    pub queries: usize,
}

/// Memoizing wrapper around a labeling oracle that counts distinct queries.
pub struct Oracle<'a> {
    answer: Box<dyn FnMut(usize) -> usize + 'a>,
    known: BTreeMap<usize, usize>,
    order: Vec<usize>,
}

impl<'a> Oracle<'a> {
    pub fn new(answer: impl FnMut(usize) -> usize + 'a) -> Self {
        Self {
            answer: Box::new(answer),
            known: BTreeMap::new(),
            order: Vec::new(),
        }
    }

    /// Oracle answering from a ground-truth label vector.
    pub fn from_labels(labels: &'a [usize]) -> Self {
        Self::new(move |i| labels[i])
    }

    pub fn queries(&self) -> usize {
        self.order.len()
    }

    /// Queried indices in query order.
    pub fn history(&self) -> &[usize] {
        &self.order
    }

    pub fn known(&self, i: usize) -> Option<usize> {
        self.known.get(&i).copied()
    }

    /// Label of `i`, asking the oracle only if it is not yet known and the
    /// budget allows.
    pub fn ask(&mut self, i: usize, budget: usize) -> Option<usize> {
        if let Some(&l) = self.known.get(&i) {
            return Some(l);
        }
        if self.order.len() >= budget {
            return None;
        }
        let l = (self.answer)(i);
        self.known.insert(i, l);
        self.order.push(i);
        Some(l)
    }
}

/// Index of the largest `values[i]` over `members`, lowest index on ties.
fn argmax_in(members: &[usize], values: &[f64]) -> usize {
    let mut best = members[0];
    for &i in members {
        if values[i] > values[best] {
            best = i;
        }
    }
    best
}

/// Queries the point of maximal `F_n` in every cluster of at least
/// `min_size` points and spreads the answers. Points outside labeled
/// clusters take the label of the nearest labeled point.
pub fn active_label(
    cloud: &MetricCloud,
    est: &SupportEstimate,
    partition: ClusterPartition,
    oracle: &mut Oracle<'_>,
    budget: usize,
    min_size: usize,
) -> LabeledPartition {
    let before = oracle.queries();
    let mut labeled = label_clusters(cloud, est, partition, min_size, |i| oracle.ask(i, budget));
    labeled.queries = oracle.queries() - before;
    labeled
}

fn label_clusters(
    cloud: &MetricCloud,
    est: &SupportEstimate,
    partition: ClusterPartition,
    min_size: usize,
    mut ask: impl FnMut(usize) -> Option<usize>,
) -> LabeledPartition {
    let mut cluster_labels = vec![None; partition.clusters.len()];
    let mut representatives = vec![None; partition.clusters.len()];
    for (c, members) in partition.clusters.iter().enumerate() {
        if members.len() < min_size.max(1) {
            continue;
        }
        let rep = argmax_in(members, &est.at_samples);
        if let Some(l) = ask(rep) {
            cluster_labels[c] = Some(l);
            representatives[c] = Some(rep);
        }
    }
    let mut labels = vec![None; cloud.len()];
    for (members, label) in partition.clusters.iter().zip(&cluster_labels) {
        for &i in members {
            labels[i] = *label;
        }
    }
    spread_to_nearest(cloud, &mut labels);
    LabeledPartition {
        partition,
        cluster_labels,
        representatives,
        labels,
        queries: 0,
    }
}

/// Gives every unlabeled point the label of its nearest labeled point.
fn spread_to_nearest(cloud: &MetricCloud, labels: &mut [Option<usize>]) {
    let sources: Vec<usize> = (0..labels.len()).filter(|&i| labels[i].is_some()).collect();
    if sources.is_empty() {
        return;
    }
    let fills: Vec<(usize, Option<usize>)> = (0..labels.len())
        .into_par_iter()
        .filter(|&i| labels[i].is_none())
        .map(|i| {
            let mut best = (f64::INFINITY, sources[0]);
            for &s in &sources {
                let d = cloud.dist(i, s);
                if d < best.0 {
                    best = (d, s);
                }
            }
            (i, labels[best.1])
        })
        .collect();
    for (i, l) in fills {
        labels[i] = l;
    }
}

/// Separation scale: fixed, or a multiple of the median nearest-neighbor
/// distance of the kept points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaChoice {
    Auto { factor: f64 },
    Fixed(f64),
}

impl Default for EtaChoice {
    fn default() -> Self {
        EtaChoice::Auto { factor: 3.0 }
    }
}

/// Second-level search inside clusters whose labels disagree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Refinement {
    /// Extra queries per cluster used to detect label conflicts.
    pub probes_per_cluster: usize,
    /// Maximal nesting depth below the first level.
    pub max_depth: usize,
    /// Threshold applied inside a conflicting cluster.
    pub theta: f64,
    /// Factor by which `n` grows per level.
    pub degree_growth: f64,
    /// Factor applied to the median nearest-neighbor distance for `eta`.
    pub eta_factor: f64,
}

impl Default for Refinement {
    fn default() -> Self {
        Self {
            probes_per_cluster: 2,
            max_depth: 2,
            theta: 0.1,
            degree_growth: 1.5,
            eta_factor: 6.0,
        }
    }
}

/// Parameters of [`masc_pipeline`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MascConfig {
    /// Kernel degree; `None` picks the smallest `n >= 4 / eta`.
    pub n: Option<usize>,
    pub theta: f64,
    pub eta: EtaChoice,
    pub filter: FilterSpec,
    pub form: PsiForm,
    pub budget: usize,
    /// Clusters smaller than this fraction of the kept points are not
    /// queried and take the label of their nearest labeled neighbor.
    pub min_cluster_fraction: f64,
    pub refinement: Option<Refinement>,
}

impl Default for MascConfig {
    fn default() -> Self {
        Self {
            n: None,
            theta: 0.01,
            eta: EtaChoice::default(),
            filter: FilterSpec::quintic(),
            form: PsiForm::SquaredReal,
            budget: usize::MAX,
            min_cluster_fraction: 0.01,
            refinement: None,
        }
    }
}

/// Summary of one clustering level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub depth: usize,
    pub points: usize,
    pub n: usize,
    pub eta: f64,
    pub kept: usize,
    pub clusters: usize,
    /// Smallest inter-cluster distance (infinite for a single cluster).
    pub min_gap: f64,
}

/// Output of [`masc_pipeline`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MascResult {
    pub labels: Vec<Option<usize>>,
    pub queries: usize,
    pub queried: Vec<usize>,
    /// Number of clusters at the first level.
    pub clusters: usize,
    pub levels: Vec<LevelSummary>,
}

impl MascResult {
    /// Fraction of points whose label equals `truth`.
    pub fn accuracy(&self, truth: &[usize]) -> f64 {
        let hits = self
            .labels
            .iter()
            .zip(truth)
            .filter(|(l, t)| **l == Some(**t))
            .count();
        hits as f64 / truth.len().max(1) as f64
    }
}

/// Support estimate, threshold, clustering and active labeling, with an
/// optional hierarchical pass that re-runs the pipeline inside clusters
/// whose extra probes disagree with the queried label.
pub fn masc_pipeline(
    cloud: &MetricCloud,
    oracle: &mut Oracle<'_>,
    config: &MascConfig,
) -> Result<MascResult> {
    check_theta(config.theta)?;
    let all: Vec<usize> = (0..cloud.len()).collect();
    let mut levels = Vec::new();
    let params = LevelParams {
        n: config.n,
        theta: config.theta,
        eta: config.eta,
        depth: 0,
    };
    let level = build_level(cloud, &all, config, params)?;
    let mut labels = run_level(cloud, &all, oracle, config, params, level, &mut levels)?;
    spread_to_nearest(cloud, &mut labels);
    Ok(MascResult {
        labels,
        queries: oracle.queries(),
        queried: oracle.history().to_vec(),
        clusters: levels.first().map_or(0, |l| l.clusters),
        levels,
    })
}

fn choose_degree(eta: f64) -> usize {
    (4.0 / eta).ceil().max(1.0) as usize
}

/// Per-level parameters of [`run_level`].
#[derive(Debug, Clone, Copy)]
struct LevelParams {
    n: Option<usize>,
    theta: f64,
    eta: EtaChoice,
    depth: usize,
}

/// Support estimate and partition of one level, before any query.
struct Level {
    sub: MetricCloud,
    est: SupportEstimate,
    partition: ClusterPartition,
    summary: LevelSummary,
    min_size: usize,
}

impl Level {
    fn significant(&self) -> usize {
        self.partition
            .clusters
            .iter()
            .filter(|c| c.len() >= self.min_size.max(1))
            .count()
    }
}

fn build_level(cloud: &MetricCloud, members: &[usize], config: &MascConfig, params: LevelParams) -> Result<Level> {
    let sub = cloud.subset(members)?;
    let local: Vec<usize> = (0..sub.len()).collect();
    let pre_eta = match params.eta {
        EtaChoice::Fixed(e) => e,
        EtaChoice::Auto { factor } => factor * sub.median_nn_distance(&local).unwrap_or(1.0),
    };
    let n = params.n.unwrap_or_else(|| choose_degree(pre_eta));
    let kernel = PsiKernel::new(n, &config.filter, config.form)?;
    let est = support_estimate(&sub, &kernel, &config.filter, &[])?;
    let kept = threshold_set(&est, params.theta)?;
    let eta = match params.eta {
        EtaChoice::Fixed(e) => e,
        EtaChoice::Auto { factor } => factor * sub.median_nn_distance(&kept).unwrap_or(pre_eta / factor),
    };
    let partition = cluster(&sub, &kept, eta)?;
    let min_gap = partition.min_gap(&sub);
    if min_gap < eta {
        return Err(Error::InvalidParameter {
            name: "eta",
            reason: format!("partition gap {min_gap} below separation {eta}"),
        });
    }
    let summary = LevelSummary {
        depth: params.depth,
        points: sub.len(),
        n,
        eta,
        kept: kept.len(),
        clusters: partition.clusters.len(),
        min_gap,
    };
    let min_size = (config.min_cluster_fraction * kept.len() as f64).ceil() as usize;
    Ok(Level {
        sub,
        est,
        partition,
        summary,
        min_size,
    })
}

/// Labels for `members` (indexed like `cloud`), `None` outside `members`.
fn run_level(
    cloud: &MetricCloud,
    members: &[usize],
    oracle: &mut Oracle<'_>,
    config: &MascConfig,
    params: LevelParams,
    level: Level,
    levels: &mut Vec<LevelSummary>,
) -> Result<Vec<Option<usize>>> {
    let Level {
        sub,
        est,
        partition,
        summary,
        min_size,
    } = level;
    levels.push(summary.clone());
    let labeled = label_clusters(&sub, &est, partition, min_size, |i| oracle.ask(members[i], config.budget));
    let Some(refine) = config.refinement.as_ref() else {
        return Ok(to_global(cloud.len(), members, &labeled.labels));
    };
    // Only kept points carry a decided label from here on; the rest are
    // filled from their nearest decided neighbor at the end.
    let mut local_labels: Vec<Option<usize>> = vec![None; sub.len()];
    let mut conflicted = Vec::new();
    for (c, cm) in labeled.partition.clusters.iter().enumerate() {
        let (Some(label), Some(rep)) = (labeled.cluster_labels[c], labeled.representatives[c]) else {
            continue;
        };
        let mut agree = true;
        for p in spread_probes(&sub, cm, &[rep], refine.probes_per_cluster) {
            if let Some(l) = oracle.ask(members[p], config.budget) {
                agree &= l == label;
            }
        }
        if agree {
            cm.iter().for_each(|&i| local_labels[i] = Some(label));
        } else {
            conflicted.push(c);
        }
    }
    let open_size: usize = conflicted.iter().map(|&c| labeled.partition.clusters[c].len()).sum();
    let spare = config.budget.saturating_sub(oracle.queries());
    for &c in &conflicted {
        let cm = &labeled.partition.clusters[c];
        let inner: Vec<usize> = cm.iter().map(|&i| members[i]).collect();
        let child_params = LevelParams {
            n: Some(((summary.n as f64) * refine.degree_growth).ceil() as usize),
            theta: refine.theta,
            eta: EtaChoice::Auto {
                factor: refine.eta_factor,
            },
            depth: params.depth + 1,
        };
        let child = if params.depth < refine.max_depth && cm.len() >= 4 {
            let child = build_level(cloud, &inner, config, child_params)?;
            (child.significant() >= 2).then_some(child)
        } else {
            None
        };
        let resolved: Vec<Option<usize>> = match child {
            Some(child) => {
                let refined = run_level(cloud, &inner, oracle, config, child_params, child, levels)?;
                inner.iter().map(|&g| refined[g]).collect()
            }
            None => {
                // The support does not separate further: spread this
                // cluster's share of the remaining budget over it and
                // label by the nearest answer.
                let share = spare * cm.len() / open_size.max(1);
                let asked: Vec<usize> = cm.iter().copied().filter(|&i| oracle.known(members[i]).is_some()).collect();
                for p in spread_probes(&sub, cm, &asked, share) {
                    oracle.ask(members[p], config.budget);
                }
                let answered: Vec<(usize, usize)> = cm
                    .iter()
                    .filter_map(|&i| oracle.known(members[i]).map(|l| (i, l)))
                    .collect();
                cm.iter()
                    .map(|&i| {
                        answered
                            .iter()
                            .min_by(|a, b| sub.dist(i, a.0).total_cmp(&sub.dist(i, b.0)))
                            .map(|&(_, l)| l)
                    })
                    .collect()
            }
        };
        for (&i, r) in cm.iter().zip(resolved) {
            local_labels[i] = r;
        }
    }
    spread_to_nearest(&sub, &mut local_labels);
    Ok(to_global(cloud.len(), members, &local_labels))
}

fn to_global(len: usize, members: &[usize], local: &[Option<usize>]) -> Vec<Option<usize>> {
    let mut out = vec![None; len];
    for (&g, l) in members.iter().zip(local) {
        out[g] = *l;
    }
    out
}

/// `count` further cluster members chosen by farthest-point traversal,
/// starting from the already chosen `seeds`.
fn spread_probes(cloud: &MetricCloud, members: &[usize], seeds: &[usize], count: usize) -> Vec<usize> {
    let mut nearest: Vec<f64> = members
        .iter()
        .map(|&i| seeds.iter().map(|&s| cloud.dist(i, s)).fold(f64::INFINITY, f64::min))
        .collect();
    let mut chosen = Vec::with_capacity(count);
    for _ in 0..count {
        let Some((k, &d)) = nearest
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        else {
            break;
        };
        if d <= 0.0 {
            break;
        }
        let next = members[k];
        chosen.push(next);
        for (slot, &i) in nearest.iter_mut().zip(members) {
            *slot = slot.min(cloud.dist(i, next));
        }
    }
    chosen
}

/// Labeled synthetic data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledData {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

/// Three half-circle arcs of radius one, `per_class` points each, with
/// Gaussian coordinate noise. Consecutive arcs are 0.5 apart.
pub fn three_moons(per_class: usize, noise: f64, seed: u64) -> LabeledData {
    let mut r = rng::stream(seed, "three-moons");
    let jitter = Normal::new(0.0, noise.max(0.0)).expect("finite noise");
    let mut points = Vec::with_capacity(3 * per_class);
    let mut labels = Vec::with_capacity(3 * per_class);
    for class in 0..3 {
        for _ in 0..per_class {
            let t = r.random_range(0.0..PI);
            let (s, c) = t.sin_cos();
            let base = match class {
                0 => [c, s],
                1 => [1.0 - c, 0.5 - s],
                _ => [3.5 + c, s],
            };
            points.push(vec![base[0] + jitter.sample(&mut r), base[1] + jitter.sample(&mut r)]);
            labels.push(class);
        }
    }
    LabeledData { points, labels }
}

/// A unit circle (label 0) and a concentric ellipse (label 1) with major
/// semi-axis `major` and eccentricity `eccentricity`, each sampled
/// uniformly in arclength, with Gaussian coordinate noise.
pub fn circle_ellipse(per_class: usize, major: f64, eccentricity: f64, noise: f64, seed: u64) -> LabeledData {
    let mut r = rng::stream(seed, "circle-ellipse");
    let jitter = Normal::new(0.0, noise.max(0.0)).expect("finite noise");
    let minor = major * (1.0 - eccentricity * eccentricity).max(0.0).sqrt();
    let arc = ArclengthTable::ellipse(major, minor, 4096);
    let mut points = Vec::with_capacity(2 * per_class);
    let mut labels = Vec::with_capacity(2 * per_class);
    for class in 0..2 {
        for _ in 0..per_class {
            let u: f64 = r.random();
            let (x, y) = if class == 0 {
                let t = 2.0 * PI * u;
                (t.cos(), t.sin())
            } else {
                let t = arc.parameter_at(u);
                (major * t.cos(), minor * t.sin())
            };
            points.push(vec![x + jitter.sample(&mut r), y + jitter.sample(&mut r)]);
            labels.push(class);
        }
    }
    LabeledData { points, labels }
}

/// Inverse of the normalized arclength of `t -> (a cos t, b sin t)`.
struct ArclengthTable {
    cumulative: Vec<f64>,
}

impl ArclengthTable {
    fn ellipse(a: f64, b: f64, segments: usize) -> Self {
        let speed = |t: f64| (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt();
        let h = 2.0 * PI / segments as f64;
        let mut cumulative = vec![0.0];
        for k in 0..segments {
            let t0 = k as f64 * h;
            // Simpson on each segment.
            let piece = h / 6.0 * (speed(t0) + 4.0 * speed(t0 + h / 2.0) + speed(t0 + h));
            cumulative.push(cumulative[k] + piece);
        }
        let total = cumulative[segments];
        cumulative.iter_mut().for_each(|c| *c /= total);
        Self { cumulative }
    }

    fn parameter_at(&self, u: f64) -> f64 {
        let k = self.cumulative.partition_point(|&c| c <= u).clamp(1, self.cumulative.len() - 1);
        let (c0, c1) = (self.cumulative[k - 1], self.cumulative[k]);
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        let h = 2.0 * PI / (self.cumulative.len() - 1) as f64;
        (k as f64 - 1.0 + frac) * h
    }
}

/// Components of the one-dimensional mixture on the circle.
pub const MIXTURE_ATOMS: [f64; 3] = [-2.0, 0.4, 1.5];

/// 1200 uniform points on `[-0.6, -0.4]` (label 0), 2400 normal points with
/// mean 0.05 and standard deviation 0.2 (label 1), and atoms at -2, 0.4 and
/// 1.5 with 60, 120 and 120 copies (labels 2, 3, 4). Points are wrapped
/// into `[-pi, pi)`.
pub fn atomic_mixture(seed: u64) -> LabeledData {
    let mut r = rng::stream(seed, "atomic-mixture");
    let normal = Normal::new(0.05, 0.2).expect("valid normal");
    let mut points = Vec::with_capacity(3900);
    let mut labels = Vec::with_capacity(3900);
    for _ in 0..1200 {
        points.push(vec![r.random_range(-0.6..=-0.4)]);
        labels.push(0);
    }
    for _ in 0..2400 {
        points.push(vec![crate::torus::wrap(normal.sample(&mut r))]);
        labels.push(1);
    }
    for (k, (&atom, copies)) in MIXTURE_ATOMS.iter().zip([60, 120, 120]).enumerate() {
        for _ in 0..copies {
            points.push(vec![atom]);
            labels.push(2 + k);
        }
    }
    LabeledData { points, labels }
}

/// Strict local maxima of `values` on a periodic grid.
pub fn periodic_local_maxima(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    (0..n)
        .filter(|&i| {
            let prev = values[(i + n - 1) % n];
            let next = values[(i + 1) % n];
            values[i] > prev && values[i] >= next
        })
        .collect()
}
