//! Experiment runner for the `locapprox` toolkit: dataset generators,
//! JSON configs and reports, and SVG plots.

pub mod data;
pub mod error;
pub mod experiments;
pub mod report;
pub mod svg;

pub use error::CliError;
