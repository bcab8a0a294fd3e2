use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::config::ExperimentConfig;

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";
pub const SERIES_FILE: &str = "series.csv";
/// Wall-clock time lives apart from the byte-stable files.
pub const TIMING_FILE: &str = "timing.json";

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("cannot encode {path}: {message}")]
    Encode { path: PathBuf, message: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

/// A table cell. Non-finite numbers never reach a table: they become `Aborted`.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Aborted,
}

impl Cell {
    pub fn num(v: f64) -> Self {
        if v.is_finite() {
            Cell::Num(v)
        } else {
            Cell::Aborted
        }
    }

    pub fn opt(v: Option<f64>) -> Self {
        v.map_or(Cell::Aborted, Cell::num)
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Aborted => "aborted".to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    /// `columns` as `(name, unit)` pairs.
    pub fn new(name: &str, columns: &[(&str, &str)]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|&(n, u)| Column { name: n.into(), unit: u.into() }).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Numeric values of a column, `None` for aborted or text cells.
    pub fn numbers(&self, name: &str) -> Vec<Option<f64>> {
        let Some(c) = self.column(name) else { return Vec::new() };
        self.rows
            .iter()
            .map(|r| match r[c] {
                Cell::Num(v) => Some(v),
                Cell::Int(i) => Some(i as f64),
                _ => None,
            })
            .collect()
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }
}

/// One curve of the long-format plot table.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: &str, points: Vec<(f64, f64)>) -> Self {
        Self { name: name.to_string(), points }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "state", rename_all = "lowercase")]
pub enum RunStatus {
    Complete,
    /// Some members failed; their rows are marked `aborted`.
    Partial { failures: Vec<String> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub status: RunStatus,
    /// Scalar results (fitted slopes, spreads, maxima), keyed for stable ordering.
    pub summary: BTreeMap<String, Value>,
    pub tables: Vec<Table>,
    pub series: Vec<Series>,
    /// Integrator steps taken over all runs.
    pub steps: u64,
    pub wall_clock: Option<Duration>,
}

impl RunReport {
    pub fn empty(config: ExperimentConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            config,
            status: RunStatus::Complete,
            summary: BTreeMap::new(),
            tables: Vec::new(),
            series: Vec::new(),
            steps: 0,
            wall_clock: None,
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn summary_f64(&self, key: &str) -> Option<f64> {
        self.summary.get(key).and_then(Value::as_f64)
    }

    pub fn is_complete(&self) -> bool {
        self.status == RunStatus::Complete
    }

    pub(crate) fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    /// Record a float, writing `"aborted"` when it is missing or not finite.
    pub(crate) fn note_f64(&mut self, key: &str, value: Option<f64>) {
        let v = match value {
            Some(x) if x.is_finite() => Value::from(x),
            _ => Value::from("aborted"),
        };
        self.summary.insert(key.to_string(), v);
    }

    pub(crate) fn fail(&mut self, what: String) {
        match &mut self.status {
            RunStatus::Complete => self.status = RunStatus::Partial { failures: vec![what] },
            RunStatus::Partial { failures } => failures.push(what),
        }
    }
}

#[derive(Serialize)]
struct TableEntry<'a> {
    name: &'a str,
    file: String,
    columns: &'a [Column],
    rows: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    experiment: &'a str,
    status: &'a RunStatus,
    steps: u64,
    summary: &'a BTreeMap<String, Value>,
    tables: Vec<TableEntry<'a>>,
    series: Option<&'a str>,
    config: &'a ExperimentConfig,
}

/// Write the manifest, one CSV per table and the long-format `series.csv`
/// into `dir` (created if needed). Returns the files written, manifest first.
pub fn emit_tables(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>, EmitError> {
    fs::create_dir_all(dir).map_err(|source| EmitError::Io { path: dir.to_path_buf(), source })?;
    let mut written = Vec::new();

    let manifest = Manifest {
        schema_version: report.schema_version,
        experiment: report.config.experiment.as_str(),
        status: &report.status,
        steps: report.steps,
        summary: &report.summary,
        tables: report
            .tables
            .iter()
            .map(|t| TableEntry { name: &t.name, file: t.file_name(), columns: &t.columns, rows: t.rows.len() })
            .collect(),
        series: (!report.series.is_empty()).then_some(SERIES_FILE),
        config: &report.config,
    };
    let path = dir.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| EmitError::Encode { path: path.clone(), message: e.to_string() })?;
    text.push('\n');
    write(&path, text.as_bytes())?;
    written.push(path);

    for table in &report.tables {
        let path = dir.join(table.file_name());
        let header = table.columns.iter().map(|c| if c.unit.is_empty() { c.name.clone() } else { format!("{} [{}]", c.name, c.unit) });
        let rows = table.rows.iter().map(|r| r.iter().map(Cell::render).collect::<Vec<_>>());
        write(&path, &csv_bytes(&path, header.collect(), rows)?)?;
        written.push(path);
    }

    if !report.series.is_empty() {
        let path = dir.join(SERIES_FILE);
        let rows = report.series.iter().flat_map(|s| {
            s.points.iter().map(move |&(x, y)| vec![s.name.clone(), Cell::num(x).render(), Cell::num(y).render()])
        });
        let header = vec!["series".to_string(), "x".to_string(), "y".to_string()];
        write(&path, &csv_bytes(&path, header, rows)?)?;
        written.push(path);
    }

    if let Some(wall) = report.wall_clock {
        let path = dir.join(TIMING_FILE);
        let text = format!("{{\n  \"wall_clock_seconds\": {:.3}\n}}\n", wall.as_secs_f64());
        write(&path, text.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

fn csv_bytes(path: &Path, header: Vec<String>, rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>, EmitError> {
    let encode = |e: csv::Error| EmitError::Encode { path: path.to_path_buf(), message: e.to_string() };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).map_err(encode)?;
    for r in rows {
        w.write_record(&r).map_err(encode)?;
    }
    w.into_inner().map_err(|e| EmitError::Encode { path: path.to_path_buf(), message: e.to_string() })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), EmitError> {
    fs::write(path, bytes).map_err(|source| EmitError::Io { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ExperimentConfig, ExperimentKind};

    fn report() -> RunReport {
        RunReport::empty(ExperimentConfig::new(ExperimentKind::InviscidSweep).resolve().unwrap())
    }

    #[test]
    fn empty_report_writes_manifest_only() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_tables(&report(), dir.path()).unwrap();
        assert_eq!(files, vec![dir.path().join(MANIFEST_FILE)]);
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
        let manifest: Value = serde_json::from_slice(&fs::read(&files[0]).unwrap()).unwrap();
        assert_eq!(manifest["schema_version"], SCHEMA_VERSION);
        assert_eq!(manifest["config"]["grid"]["points"], 1024);
        assert!(manifest["config"]["time"]["dt"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn cells_render_without_loss() {
        for v in [0.1, 1.0 / 3.0, 6.02e23, -2.5e-300] {
            let Cell::Num(x) = Cell::num(v) else { panic!() };
            assert_eq!(Cell::Num(x).render().parse::<f64>().unwrap(), v);
        }
        assert_eq!(Cell::num(f64::NAN), Cell::Aborted);
        assert_eq!(Cell::opt(None).render(), "aborted");
    }

    #[test]
    fn tables_have_unit_headers() {
        let mut r = report();
        let mut t = Table::new("sweep", &[("epsilon", ""), ("sup_Hs_error", "H^s"), ("slope_fit", "")]);
        t.push(vec![Cell::num(0.1), Cell::num(0.03), Cell::Aborted]);
        r.tables.push(t);
        r.series.push(Series::new("sup_Hs_error", vec![(0.1, 0.03)]));
        r.wall_clock = Some(Duration::from_millis(1500));
        let dir = tempfile::tempdir().unwrap();
        emit_tables(&r, dir.path()).unwrap();
        let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        assert_eq!(csv, "epsilon,sup_Hs_error [H^s],slope_fit\n1e-1,3e-2,aborted\n");
        let series = fs::read_to_string(dir.path().join(SERIES_FILE)).unwrap();
        assert_eq!(series, "series,x,y\nsup_Hs_error,1e-1,3e-2\n");
        assert!(dir.path().join(TIMING_FILE).exists());
    }

    #[test]
    fn unwritable_directory_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, b"x").unwrap();
        let err = emit_tables(&report(), &blocker.join("sub")).unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
    }

    #[test]
    fn partial_status_accumulates() {
        let mut r = report();
        r.fail("ε = 0.1".into());
        r.fail("ε = 0.01".into());
        assert_eq!(r.status, RunStatus::Partial { failures: vec!["ε = 0.1".into(), "ε = 0.01".into()] });
    }
}
