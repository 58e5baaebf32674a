//! Dataset generators and CSV input/output.

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use locapprox::manifold::GreatCircle;
use locapprox::masc::{self, LabeledData};
use locapprox::{rng, sphere};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum DataKind {
    /// Uniform points on S^2: columns x,y,z.
    UniformSphere,
    /// Uniform points on a tilted great circle of S^2: columns x,y,z.
    GreatCircle,
    /// 3900-point mixture on the circle: columns x,label.
    #[value(name = "example10_1")]
    #[serde(rename = "example10_1")]
    Example10_1,
    /// Three noisy half-circle arcs: columns x,y,label.
    ThreeMoons,
    /// Unit circle and concentric ellipse: columns x,y,label.
    CircleEllipse,
}

/// A numeric table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn from_points(names: &[&str], points: Vec<Vec<f64>>) -> Self {
        Self {
            header: names.iter().map(|s| s.to_string()).collect(),
            rows: points,
        }
    }

    fn labeled(names: &[&str], data: LabeledData) -> Self {
        let rows = data
            .points
            .into_iter()
            .zip(data.labels)
            .map(|(mut p, l)| {
                p.push(l as f64);
                p
            })
            .collect();
        Self {
            header: names.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Every column except `label`, `value` and `weight`.
    pub fn coordinates(&self) -> Vec<Vec<f64>> {
        let keep: Vec<usize> = (0..self.header.len())
            .filter(|&i| !matches!(self.header[i].as_str(), "label" | "value" | "weight"))
            .collect();
        self.rows
            .iter()
            .map(|r| keep.iter().map(|&i| r[i]).collect())
            .collect()
    }

    pub fn values_of(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
        w.write_record(&self.header).map_err(|e| csv_error(path, e))?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format_number(*v)))
                .map_err(|e| csv_error(path, e))?;
        }
        w.flush().map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
        let header: Vec<String> = r
            .headers()
            .map_err(|e| csv_error(path, e))?
            .iter()
            .map(|s| s.trim().to_string())
            .collect();
        let mut rows = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| csv_error(path, e))?;
            let row = rec
                .iter()
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| CliError::Data {
                        path: path.to_path_buf(),
                        message: format!("row {}: `{s}` is not a number", line + 1),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(Self { header, rows })
    }
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    CliError::Data {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Shortest round-trip representation; integers without a decimal point.
fn format_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Default size parameter per kind: total points for the unlabeled kinds,
/// points per class for the labeled ones (ignored for the mixture).
pub fn default_count(kind: DataKind) -> usize {
    match kind {
        DataKind::UniformSphere | DataKind::GreatCircle => 1000,
        DataKind::Example10_1 => 3900,
        DataKind::ThreeMoons => 500,
        DataKind::CircleEllipse => 1000,
    }
}

pub fn generate(kind: DataKind, count: Option<usize>, seed: u64) -> Table {
    let count = count.unwrap_or_else(|| default_count(kind));
    match kind {
        DataKind::UniformSphere => {
            let mut r = rng::stream(seed, "gen-uniform-sphere");
            let pts = sphere::uniform_points(2, count, &mut r)
                .into_iter()
                .map(|p| p.into_inner())
                .collect();
            Table::from_points(&["x", "y", "z"], pts)
        }
        DataKind::GreatCircle => {
            let mut r = rng::stream(seed, "gen-great-circle");
            Table::from_points(&["x", "y", "z"], GreatCircle::tilted().uniform(count, &mut r))
        }
        DataKind::Example10_1 => Table::labeled(&["x", "label"], masc::atomic_mixture(seed)),
        DataKind::ThreeMoons => Table::labeled(&["x", "y", "label"], masc::three_moons(count, 0.05, seed)),
        DataKind::CircleEllipse => Table::labeled(
            &["x", "y", "label"],
            masc::circle_ellipse(count, 1.4, 0.79, 0.05, seed),
        ),
    }
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(contents).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_sizes() {
        assert_eq!(generate(DataKind::CircleEllipse, None, 7).rows.len(), 2000);
        assert_eq!(generate(DataKind::CircleEllipse, None, 7).header.len(), 3);
        assert_eq!(generate(DataKind::Example10_1, None, 3).rows.len(), 3900);
        assert!(generate(DataKind::UniformSphere, Some(0), 1).rows.is_empty());
        assert_eq!(generate(DataKind::ThreeMoons, None, 1).rows.len(), 1500);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let t = generate(DataKind::ThreeMoons, Some(5), 2);
        t.write(&path).unwrap();
        let back = Table::read(&path).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn empty_csv_keeps_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        generate(DataKind::UniformSphere, Some(0), 1).write(&path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap().trim(), "x,y,z");
        let back = Table::read(&path).unwrap();
        assert!(back.rows.is_empty());
        assert_eq!(back.header, ["x", "y", "z"]);
    }
}
