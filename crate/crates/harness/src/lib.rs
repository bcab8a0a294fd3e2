//! Experiment runner for the MKdV-Burgers laboratory.
//!
//! A run goes config → [`run`] → [`RunReport`] → [`emit_tables`]: a
//! `manifest.json` with the resolved config and scalar results, one CSV per
//! table and a long-format `series.csv` for plotting. Wall-clock time goes to
//! `timing.json` so the other files are byte-identical across reruns.

pub mod config;
pub mod report;
pub mod run;

pub use config::{parse_config, ConfigError, ExperimentConfig, ExperimentKind};
pub use report::{emit_tables, Cell, Column, EmitError, RunReport, RunStatus, Series, Table, SCHEMA_VERSION};
pub use run::{run, RunError};
