//! Experiment configuration: a TOML document with one section per concern.
//!
//! ```toml
//! experiment = "inviscid-sweep"
//! seed = 7
//!
//! [grid]
//! length = 201.06192982974676   # 64π
//! points = 1024
//!
//! [equation]
//! family = "mkdv-b"
//! epsilon = 0.01
//! alpha = 1.0
//!
//! [data]
//! profile = "gaussian"
//! amplitude = 0.5
//! width = 2.0
//!
//! [time]
//! final = 1.0
//! dt = 0.01
//! record_every = 5
//!
//! [sweep]
//! epsilons = [1e-1, 1e-2, 1e-3, 1e-4]
//! s = 1.0
//! ```
//!
//! Every section and key is optional except `experiment`; [`parse_config`]
//! fills the defaults in so the resolved config can be echoed in full.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use mkdvb_core::estimates::{resonance_matched_j, BlockIndices, BoundCase, DEFAULT_NODES};
use mkdvb_core::evolution::{default_dt, EquationSpec, Family};
use mkdvb_core::profiles::Profile;
use mkdvb_core::spectral::PeriodicGrid;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    /// Malformed document or unknown key; the message names the key.
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("{key} = {value} is out of range: {constraint}")]
    Range { key: String, value: String, constraint: String },
    #[error("inconsistent config: {0}")]
    Consistency(String),
}

fn range(key: &str, value: impl fmt::Display, constraint: &str) -> ConfigError {
    ConfigError::Range { key: key.into(), value: value.to_string(), constraint: constraint.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Evolve,
    Conserve,
    InviscidSweep,
    Scaling,
    Miura,
    Jbounds,
    Linfs,
    Strichartz,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::Evolve,
        ExperimentKind::Conserve,
        ExperimentKind::InviscidSweep,
        ExperimentKind::Scaling,
        ExperimentKind::Miura,
        ExperimentKind::Jbounds,
        ExperimentKind::Linfs,
        ExperimentKind::Strichartz,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Evolve => "evolve",
            ExperimentKind::Conserve => "conserve",
            ExperimentKind::InviscidSweep => "inviscid-sweep",
            ExperimentKind::Scaling => "scaling",
            ExperimentKind::Miura => "miura",
            ExperimentKind::Jbounds => "jbounds",
            ExperimentKind::Linfs => "linfs",
            ExperimentKind::Strichartz => "strichartz",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub length: f64,
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { length: 64.0 * PI, points: 1024 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquationConfig {
    pub family: Family,
    pub epsilon: f64,
    /// Dissipation order; also used by the sweep, scaling and linear experiments.
    pub alpha: f64,
}

impl Default for EquationConfig {
    fn default() -> Self {
        Self { family: Family::Mkdv, epsilon: 0.0, alpha: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(rename = "final")]
    pub final_time: f64,
    /// Filled from the data and grid when absent.
    pub dt: Option<f64>,
    pub record_every: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self { final_time: 1.0, dt: None, record_every: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub epsilons: Vec<f64>,
    /// Sobolev index of the error norm.
    pub s: f64,
    /// Largest-ε points left out of the slope fit.
    pub drop_largest: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { epsilons: vec![1e-1, 1e-2, 1e-3, 1e-4], s: 1.0, drop_largest: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingConfig {
    pub lambda: f64,
    /// Points on the rescaled grid; defaults to `grid.points`.
    pub points: Option<usize>,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self { lambda: 0.5, points: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MiuraConfig {
    /// Time steps to compare, each snapshot kept; should halve successively.
    pub dts: Vec<f64>,
}

impl Default for MiuraConfig {
    fn default() -> Self {
        Self { dts: vec![0.04, 0.02, 0.01] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleConfig {
    pub case: BoundCase,
    pub k: [i32; 4],
    /// Defaults to `[0, 0, 0, j₄]` with `j₄` matched to the resonance size.
    pub j: Option<[u32; 4]>,
}

impl TupleConfig {
    pub fn indices(&self) -> BlockIndices {
        BlockIndices::new(self.k, self.j.unwrap_or([0, 0, 0, resonance_matched_j(self.k)]))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JBoundsConfig {
    pub trials: usize,
    pub nodes: usize,
    pub tuples: Vec<TupleConfig>,
}

impl Default for JBoundsConfig {
    fn default() -> Self {
        let t = |case, k| TupleConfig { case, k, j: None };
        use BoundCase::*;
        Self {
            trials: 100,
            nodes: DEFAULT_NODES,
            tuples: vec![
                TupleConfig { case: A, k: [0, 1, 2, 2], j: Some([0, 0, 0, 0]) },
                t(A, [1, 2, 3, 3]),
                t(A, [2, 3, 4, 4]),
                t(B, [0, 1, 6, 6]),
                t(B, [0, 2, 7, 7]),
                t(B, [1, 2, 8, 8]),
                t(C, [1, 1, 1, 1]),
                t(C, [2, 2, 2, 2]),
                t(C, [3, 3, 3, 3]),
                t(D, [0, 5, 10, 10]),
                t(D, [0, 6, 11, 11]),
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinFsConfig {
    pub epsilons: Vec<f64>,
    pub s: f64,
}

impl Default for LinFsConfig {
    fn default() -> Self {
        Self { epsilons: vec![0.0, 1e-2, 1.0], s: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrichartzConfig {
    pub shells: Vec<u32>,
    pub window: f64,
    pub samples: usize,
    /// Grid used for the shell data instead of `grid.points`.
    pub points: usize,
}

impl Default for StrichartzConfig {
    fn default() -> Self {
        Self { shells: vec![3, 4, 5, 6, 7], window: 4.0, samples: 64, points: 32768 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    /// Output directory. Not echoed, so reruns into different places stay byte-identical.
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub equation: EquationConfig,
    #[serde(default = "default_data")]
    pub data: Profile,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub scaling: ScalingConfig,
    #[serde(default)]
    pub miura: MiuraConfig,
    #[serde(default)]
    pub jbounds: JBoundsConfig,
    #[serde(default)]
    pub linfs: LinFsConfig,
    #[serde(default)]
    pub strichartz: StrichartzConfig,
}

fn default_data() -> Profile {
    Profile::gaussian(0.5, 2.0)
}

/// Parse and validate a TOML document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.message().to_string()))?;
    cfg.resolve()
}

impl ExperimentConfig {
    /// Minimal config for `kind` with every default.
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            experiment: kind,
            seed: 0,
            out: None,
            grid: GridConfig::default(),
            equation: EquationConfig::default(),
            data: default_data(),
            time: TimeConfig::default(),
            sweep: SweepConfig::default(),
            scaling: ScalingConfig::default(),
            miura: MiuraConfig::default(),
            jbounds: JBoundsConfig::default(),
            linfs: LinFsConfig::default(),
            strichartz: StrichartzConfig::default(),
        }
    }

    /// Deserialize from an already-merged TOML table.
    pub fn from_table(table: toml::Table) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig =
            toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| ConfigError::Parse(e.message().to_string()))?;
        cfg.resolve()
    }

    pub fn grid(&self) -> PeriodicGrid {
        PeriodicGrid::new(self.grid.length, self.grid.points).expect("validated grid")
    }

    pub fn equation_spec(&self) -> EquationSpec {
        EquationSpec::new(self.equation.family, self.equation.epsilon, self.equation.alpha).expect("validated equation")
    }

    /// The resolved time step.
    pub fn dt(&self) -> f64 {
        self.time.dt.expect("resolved config has a time step")
    }

    /// Validate every section and fill `time.dt`.
    pub fn resolve(mut self) -> Result<Self, ConfigError> {
        let g = &self.grid;
        if !(g.length.is_finite() && g.length > 0.0) {
            return Err(range("grid.length", g.length, "L > 0"));
        }
        if g.points < 8 || !g.points.is_multiple_of(2) {
            return Err(range("grid.points", g.points, "N even and ≥ 8"));
        }

        let e = &self.equation;
        if !(0.0..=1.0).contains(&e.epsilon) {
            return Err(range("equation.epsilon", e.epsilon, "ε ∈ (0, 1] (or ε = 0 for conservative families)"));
        }
        if !(e.alpha > 0.0 && e.alpha <= 1.0) {
            return Err(range("equation.alpha", e.alpha, "α ∈ (0, 1]"));
        }
        if e.family.is_dissipative() && e.epsilon == 0.0 {
            return Err(ConfigError::Consistency(format!("family {} needs ε > 0; use {}", e.family, conservative(e.family))));
        }
        if !e.family.is_dissipative() && e.epsilon != 0.0 {
            return Err(ConfigError::Consistency(format!(
                "dissipative ε = {} requires {}, not {}",
                e.epsilon,
                dissipative(e.family),
                e.family
            )));
        }

        let t = &self.time;
        if !(t.final_time.is_finite() && t.final_time > 0.0) {
            return Err(range("time.final", t.final_time, "T > 0"));
        }
        if let Some(dt) = t.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(range("time.dt", dt, "dt > 0"));
            }
        }
        if t.record_every == 0 {
            return Err(range("time.record_every", 0, "stride ≥ 1"));
        }

        let grid = self.grid();
        let initial = self.data.sample(&grid).map_err(|e| ConfigError::Consistency(format!("data: {e}")))?;
        if self.time.dt.is_none() {
            self.time.dt = Some(default_dt(&grid, initial.max_abs(), &self.equation_spec()));
        }
        self.validate_experiment()?;
        Ok(self)
    }

    fn validate_experiment(&self) -> Result<(), ConfigError> {
        match self.experiment {
            ExperimentKind::InviscidSweep => {
                let eps = &self.sweep.epsilons;
                if eps.len() < 4 {
                    return Err(range("sweep.epsilons", format!("{eps:?}"), "at least 4 values"));
                }
                if let Some(&bad) = eps.iter().find(|&&x| !(x > 0.0 && x <= 1.0)) {
                    return Err(range("sweep.epsilons", bad, "ε ∈ (0, 1]"));
                }
                if eps.windows(2).any(|w| w[1] >= w[0]) {
                    return Err(range("sweep.epsilons", format!("{eps:?}"), "strictly decreasing"));
                }
                if eps[0] / eps[eps.len() - 1] < 100.0 {
                    return Err(range("sweep.epsilons", format!("{eps:?}"), "span at least two decades"));
                }
                if !(0.25..=2.0).contains(&self.sweep.s) {
                    return Err(range("sweep.s", self.sweep.s, "s ∈ [1/4, 2]"));
                }
                if eps.len().saturating_sub(self.sweep.drop_largest) < 2 {
                    return Err(range("sweep.drop_largest", self.sweep.drop_largest, "leave at least 2 points"));
                }
            }
            ExperimentKind::Scaling => {
                if !self.equation.family.is_cubic() {
                    return Err(ConfigError::Consistency(format!(
                        "scaling runs the cubic family, got {}",
                        self.equation.family
                    )));
                }
                let l = self.scaling.lambda;
                if !(l.is_finite() && l > 0.0) {
                    return Err(range("scaling.lambda", l, "λ > 0"));
                }
                if let Some(p) = self.scaling.points {
                    if p < self.grid.points || p % 2 != 0 {
                        return Err(range("scaling.points", p, "even and ≥ grid.points"));
                    }
                }
            }
            ExperimentKind::Miura => {
                if self.equation.family != Family::Mkdv {
                    return Err(ConfigError::Consistency(format!(
                        "miura runs MKdV trajectories, got {}",
                        self.equation.family
                    )));
                }
                if self.miura.dts.is_empty() {
                    return Err(range("miura.dts", "[]", "at least one step"));
                }
                if let Some(&bad) = self.miura.dts.iter().find(|&&d| !(d > 0.0 && d.is_finite())) {
                    return Err(range("miura.dts", bad, "dt > 0"));
                }
            }
            ExperimentKind::Jbounds => {
                let j = &self.jbounds;
                if j.trials == 0 {
                    return Err(range("jbounds.trials", 0, "at least 1"));
                }
                if j.nodes < 2 {
                    return Err(range("jbounds.nodes", j.nodes, "at least 2"));
                }
                for t in &j.tuples {
                    t.indices().check(t.case).map_err(|e| ConfigError::Consistency(format!("jbounds.tuples: {e}")))?;
                }
            }
            ExperimentKind::Linfs => {
                if let Some(&bad) = self.linfs.epsilons.iter().find(|&&x| !(0.0..=1.0).contains(&x)) {
                    return Err(range("linfs.epsilons", bad, "ε ∈ [0, 1]"));
                }
                if !(0.0..=2.0).contains(&self.linfs.s) {
                    return Err(range("linfs.s", self.linfs.s, "s ∈ [0, 2]"));
                }
            }
            ExperimentKind::Strichartz => {
                let s = &self.strichartz;
                if s.points < 8 || !s.points.is_multiple_of(2) {
                    return Err(range("strichartz.points", s.points, "N even and ≥ 8"));
                }
                if !(s.window.is_finite() && s.window > 0.0) {
                    return Err(range("strichartz.window", s.window, "T_w > 0"));
                }
                if s.samples < 2 {
                    return Err(range("strichartz.samples", s.samples, "at least 2"));
                }
            }
            ExperimentKind::Evolve | ExperimentKind::Conserve => {}
        }
        Ok(())
    }
}

fn conservative(f: Family) -> Family {
    if f.is_cubic() {
        Family::Mkdv
    } else {
        Family::Kdv
    }
}

fn dissipative(f: Family) -> Family {
    if f.is_cubic() {
        Family::MkdvB
    } else {
        Family::KdvB
    }
}
