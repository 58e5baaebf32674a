use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use locapprox::masc::{self, EtaChoice, MascConfig, MetricCloud, Oracle};
use locapprox::quadrature::{self, PointCloud, QuadratureRule};
use locapprox::zonal::{self, ZonalNetwork};
use locapprox::{FilterKind, FilterSpec};
use locapprox_cli::data::{self, DataKind, Table};
use locapprox_cli::experiments::{Experiment, Module};
use locapprox_cli::report::{self, Report};
use locapprox_cli::CliError;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "locapprox", version, about = "Localized kernel approximation experiments")]
struct Cli {
    /// Master seed; every random draw is derived from it.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for reports and plots.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic dataset as CSV.
    GenData {
        #[arg(long, value_enum)]
        kind: DataKind,
        /// Total points (sphere, great circle) or points per class (moons,
        /// circle/ellipse). Ignored for example10_1.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Torus experiments (default: the |cos x|^(1/4) comparison).
    Torus,
    /// Scattered-data quadrature.
    Quad {
        #[command(subcommand)]
        action: Option<QuadAction>,
    },
    /// Sphere approximation benchmarks (default: the five-method table).
    Sphere,
    /// Kernel regression on a great circle.
    Manifold,
    /// Zonal networks.
    Zonal {
        #[command(subcommand)]
        action: Option<ZonalAction>,
    },
    /// Active-learning cluster labeling.
    Masc {
        #[command(subcommand)]
        action: Option<MascAction>,
    },
    /// Re-render plots and print the summary of a saved report.
    Report { input: PathBuf },
}

#[derive(Subcommand, Debug)]
enum QuadAction {
    /// Minimal-norm weights on the points of a CSV file (x,y,z).
    Solve {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tensor product rule on S^2 exact below degree `order`.
    Product {
        #[arg(long)]
        order: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum ZonalAction {
    /// Build a network from samples (x,y,z,value[,weight]) and a discretizing rule.
    Fit(ZonalFit),
}

#[derive(Args, Debug)]
struct ZonalFit {
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long)]
    degree: usize,
    #[arg(long)]
    data: PathBuf,
    /// Discretizing quadrature rule (JSON, as written by `quad`).
    #[arg(long)]
    rule: PathBuf,
    #[arg(long, default_value = "quintic")]
    filter: FilterKind,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum MascAction {
    /// Label a point cloud, querying an oracle backed by a label file.
    Run(MascRun),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    Euclidean,
    Torus,
    Chordal,
}

#[derive(Debug, Clone, Copy)]
enum EtaArg {
    Auto,
    Fixed(f64),
}

impl FromStr for EtaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(EtaArg::Auto);
        }
        s.parse::<f64>()
            .ok()
            .filter(|v| *v > 0.0)
            .map(EtaArg::Fixed)
            .ok_or_else(|| format!("expected `auto` or a positive number, got `{s}`"))
    }
}

#[derive(Args, Debug)]
struct MascRun {
    #[arg(long)]
    data: PathBuf,
    /// CSV whose `label` column (or only column) answers queries.
    #[arg(long)]
    labels_oracle: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    theta: f64,
    #[arg(long, default_value = "auto")]
    eta: EtaArg,
    /// Multiple of the median nearest-neighbor distance used by `--eta auto`.
    #[arg(long, default_value_t = 3.0)]
    eta_factor: f64,
    #[arg(long, value_enum, default_value = "euclidean")]
    metric: MetricArg,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct MascRunResult {
    clusters: usize,
    queries: usize,
    accuracy: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::GenData { kind, count, out } => {
            let table = data::generate(*kind, *count, cli.seed);
            table.write(out)?;
            println!("wrote {} rows to {}", table.rows.len(), out.display());
            Ok(())
        }
        Command::Torus => run_module(cli, Module::Torus),
        Command::Quad { action: None } => run_module(cli, Module::Quad),
        Command::Quad { action: Some(a) } => quad_action(a),
        Command::Sphere => run_module(cli, Module::Sphere),
        Command::Manifold => run_module(cli, Module::Manifold),
        Command::Zonal { action: None } => run_module(cli, Module::Zonal),
        Command::Zonal {
            action: Some(ZonalAction::Fit(f)),
        } => zonal_fit(f),
        Command::Masc { action: None } => run_module(cli, Module::Masc),
        Command::Masc {
            action: Some(MascAction::Run(r)),
        } => masc_run(r),
        Command::Report { input } => render_report(input, &cli.out_dir),
    }
}

fn run_module(cli: &Cli, module: Module) -> Result<(), CliError> {
    let experiment = match &cli.config {
        Some(path) => {
            let exp = report::load_config(path)?;
            if exp.module() != module {
                return Err(CliError::Usage(format!(
                    "{} describes a `{}` experiment, run it with `locapprox {}`",
                    path.display(),
                    exp.name(),
                    exp.module()
                )));
            }
            exp
        }
        None => Experiment::default_for(module),
    };
    let start = Instant::now();
    let report = report::run(&experiment, cli.seed)?;
    let secs = start.elapsed().as_secs_f64();
    for line in report.results.summary() {
        println!("{line}");
    }
    for path in report::write_outputs(&report, Some(secs), &cli.out_dir)? {
        println!("wrote {}", path.display());
    }
    println!("{}: {secs:.1} s", experiment.name());
    Ok(())
}

fn render_report(input: &Path, out_dir: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(input).map_err(|e| CliError::io(input, e))?;
    let report: Report = serde_json::from_str(&text).map_err(|e| CliError::Data {
        path: input.to_path_buf(),
        message: e.to_string(),
    })?;
    for line in report.results.summary() {
        println!("{line}");
    }
    for (file, svg) in report::plots(&report) {
        let path = out_dir.join(file);
        data::write_file(&path, svg.as_bytes())?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn module_err(module: Module) -> impl Fn(locapprox::Error) -> CliError {
    move |source| CliError::Module { module, source }
}

fn sphere_cloud(path: &Path, table: &Table) -> Result<PointCloud, CliError> {
    let coords = table.coordinates();
    if coords.first().is_some_and(|p| p.len() != 3) {
        return Err(CliError::Data {
            path: path.to_path_buf(),
            message: "expected three coordinate columns".into(),
        });
    }
    PointCloud::sphere(2, coords).map_err(module_err(Module::Quad))
}

fn quad_action(action: &QuadAction) -> Result<(), CliError> {
    let (rule, out) = match action {
        QuadAction::Solve { data, order, out } => {
            let table = Table::read(data)?;
            let cloud = sphere_cloud(data, &table)?;
            let rule = quadrature::solve_weights(&cloud, *order).map_err(module_err(Module::Quad))?;
            (rule, out)
        }
        QuadAction::Product { order, out } => {
            (QuadratureRule::product_s2(*order).map_err(module_err(Module::Quad))?, out)
        }
    };
    data::write_file(out, report::to_json(&rule)?.as_bytes())?;
    println!(
        "{} nodes, order {}, moment residual {:.3e}; wrote {}",
        rule.len(),
        rule.order,
        rule.moment_residual,
        out.display()
    );
    Ok(())
}

fn zonal_fit(f: &ZonalFit) -> Result<(), CliError> {
    let err = module_err(Module::Zonal);
    let table = Table::read(&f.data)?;
    let values = table.values_of("value").ok_or_else(|| CliError::Data {
        path: f.data.clone(),
        message: "missing `value` column".into(),
    })?;
    let cloud = sphere_cloud(&f.data, &table)?;
    let order = 2 * f.degree + 1;
    let sampling = match table.values_of("weight") {
        Some(w) => QuadratureRule::certify(cloud, w, order).map_err(&err)?,
        None => quadrature::solve_weights(&cloud, order).map_err(&err)?,
    };
    let text = std::fs::read_to_string(&f.rule).map_err(|e| CliError::io(&f.rule, e))?;
    let discretizing: QuadratureRule = serde_json::from_str(&text).map_err(|e| CliError::Data {
        path: f.rule.clone(),
        message: e.to_string(),
    })?;
    let net: ZonalNetwork = zonal::synthesize(
        &sampling,
        &values,
        &discretizing,
        f.degree as f64,
        f.gamma,
        &FilterSpec::new(f.filter),
    )
    .map_err(&err)?;
    data::write_file(&f.out, report::to_json(&net)?.as_bytes())?;
    println!("{} centers; wrote {}", net.len(), f.out.display());
    Ok(())
}

fn masc_run(r: &MascRun) -> Result<(), CliError> {
    let err = module_err(Module::Masc);
    let table = Table::read(&r.data)?;
    let labels_table = Table::read(&r.labels_oracle)?;
    let col = labels_table
        .column("label")
        .or((labels_table.header.len() == 1).then_some(0))
        .ok_or_else(|| CliError::Data {
            path: r.labels_oracle.clone(),
            message: "missing `label` column".into(),
        })?;
    let truth: Vec<usize> = labels_table
        .rows
        .iter()
        .map(|row| row[col])
        .map(|v| {
            (v >= 0.0 && v.fract() == 0.0).then_some(v as usize).ok_or_else(|| CliError::Data {
                path: r.labels_oracle.clone(),
                message: format!("label {v} is not a non-negative integer"),
            })
        })
        .collect::<Result<_, _>>()?;
    let points = table.coordinates();
    if truth.len() != points.len() {
        return Err(CliError::Data {
            path: r.labels_oracle.clone(),
            message: format!("{} labels for {} points", truth.len(), points.len()),
        });
    }
    let cloud = match r.metric {
        MetricArg::Euclidean => MetricCloud::euclidean(points),
        MetricArg::Torus => MetricCloud::torus(points),
        MetricArg::Chordal => MetricCloud::chordal(points),
    }
    .map_err(&err)?;
    let config = MascConfig {
        n: r.n,
        theta: r.theta,
        eta: match r.eta {
            EtaArg::Auto => EtaChoice::Auto { factor: r.eta_factor },
            EtaArg::Fixed(v) => EtaChoice::Fixed(v),
        },
        budget: r.budget.unwrap_or(usize::MAX),
        ..MascConfig::default()
    };
    let mut oracle = Oracle::from_labels(&truth);
    let res = masc::masc_pipeline(&cloud, &mut oracle, &config).map_err(&err)?;
    let out = MascRunResult {
        clusters: res.clusters,
        queries: res.queries,
        accuracy: res.accuracy(&truth),
    };
    data::write_file(&r.out, report::to_json(&out)?.as_bytes())?;
    println!(
        "{} clusters, {} queries, accuracy {:.2}%; wrote {}",
        out.clusters,
        out.queries,
        100.0 * out.accuracy,
        r.out.display()
    );
    Ok(())
}
