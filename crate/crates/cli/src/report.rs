//! Reports, config loading and plot rendering.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::write_file;
use crate::error::CliError;
use crate::experiments::{Experiment, Results};
use crate::svg::{self, Scale, Series};

/// Deterministic record of one run. Wall-clock time is kept separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub seed: u64,
    pub config: Experiment,
    pub results: Results,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub experiment: String,
    pub seed: u64,
    pub wall_clock_seconds: f64,
}

pub fn load_config(path: &Path) -> Result<Experiment, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    if text.trim().is_empty() {
        return Err(CliError::Config {
            path: path.to_path_buf(),
            message: "config file is empty; expected a JSON object with an \"experiment\" field".into(),
        });
    }
    serde_json::from_str(&text).map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Runs an experiment and returns its report.
pub fn run(experiment: &Experiment, seed: u64) -> Result<Report, CliError> {
    Ok(Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        config: experiment.clone(),
        results: experiment.run(seed)?,
    })
}

/// SVG files for a report, as `(file name, contents)`.
pub fn plots(report: &Report) -> Vec<(String, String)> {
    let name = report.config.name();
    match &report.results {
        Results::Fig4(r) => r
            .rows
            .iter()
            .map(|row| {
                let curve = |c: &locapprox::torus::ErrorCurve| -> Vec<(f64, f64)> {
                    r.eval_points.iter().copied().zip(c.pointwise.iter().copied()).collect()
                };
                let svg = svg::line_chart(
                    &format!("|cos x|^(1/4), degree {}", row.degree),
                    "x",
                    "absolute error",
                    &[
                        Series::new("partial sum", curve(&row.projection)),
                        Series::new(format!("filtered ({})", row.filtered.filter), curve(&row.filtered)),
                    ],
                    Scale::Linear,
                    Scale::Log10,
                );
                (format!("{name}_n{}.svg", row.degree), svg)
            })
            .collect(),
        Results::Benchmark(b) => {
            let cats: Vec<String> = b.exponents.iter().map(|e| format!("1e-{e}")).collect();
            let series: Vec<Series> = b
                .methods
                .iter()
                .zip(&b.table)
                .map(|(m, row)| Series::new(m.clone(), row.iter().enumerate().map(|(i, v)| (i as f64, *v)).collect()))
                .collect();
            vec![(
                format!("{name}.svg"),
                svg::bar_chart("percentage of test points below threshold", "percent", &cats, &series),
            )]
        }
        Results::ManifoldRate(s) => {
            let series: Vec<Series> = s
                .runs
                .iter()
                .flat_map(|r| {
                    [
                        Series::new(
                            format!("error, seed {}", r.seed),
                            r.rows.iter().map(|row| (row.degree, row.sup_error)).collect(),
                        ),
                        Series::new(
                            format!("density, seed {}", r.seed),
                            r.rows.iter().map(|row| (row.degree, row.density_error)).collect(),
                        ),
                    ]
                })
                .collect();
            vec![(
                format!("{name}.svg"),
                svg::line_chart("sup error on the circle", "n", "error", &series, Scale::Log10, Scale::Log10),
            )]
        }
        Results::ZonalRate(s) => {
            let series: Vec<Series> = s
                .runs
                .iter()
                .map(|r| {
                    Series::new(
                        format!("seed {}", r.seed),
                        r.rows.iter().map(|row| (row.degree, row.sup_error)).collect(),
                    )
                })
                .collect();
            vec![(
                format!("{name}.svg"),
                svg::line_chart("zonal network sup error", "n", "error", &series, Scale::Log10, Scale::Log10),
            )]
        }
        Results::Masc(m) => vec![(format!("{name}.svg"), masc_scatter(name, m))],
        Results::Mixture(m) => {
            let curve = Series::new(
                "F_n",
                m.grid.iter().copied().zip(m.estimate.iter().copied()).collect(),
            );
            vec![(
                format!("{name}.svg"),
                svg::line_chart("support estimator on the circle", "x", "F_n", &[curve], Scale::Linear, Scale::Log10),
            )]
        }
        Results::Reproduction(_) | Results::ZonalReproduction(_) | Results::Quadrature(_) => Vec::new(),
    }
}

fn masc_scatter(name: &str, m: &crate::experiments::MascSummary) -> String {
    let pts: Vec<(f64, f64)> = m
        .points
        .iter()
        .map(|p| (p[0], p.get(1).copied().unwrap_or(0.0)))
        .collect();
    svg::scatter(
        &format!("{name}: {} queries, accuracy {:.1}%", m.queries, 100.0 * m.accuracy),
        &pts,
        &m.labels,
        &m.queried,
    )
}

/// Writes the report, its timing file and its plots; returns the paths.
pub fn write_outputs(report: &Report, elapsed: Option<f64>, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let name = report.config.name();
    let mut written = Vec::new();
    let path = out_dir.join(format!("{name}.json"));
    write_file(&path, to_json(report)?.as_bytes())?;
    written.push(path);
    if let Some(secs) = elapsed {
        let timing = Timing {
            experiment: name.to_string(),
            seed: report.seed,
            wall_clock_seconds: secs,
        };
        let path = out_dir.join(format!("{name}.timing.json"));
        write_file(&path, to_json(&timing)?.as_bytes())?;
        written.push(path);
    }
    for (file, svg) in plots(report) {
        let path = out_dir.join(file);
        write_file(&path, svg.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}
