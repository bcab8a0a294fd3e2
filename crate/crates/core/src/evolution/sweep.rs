use rayon::prelude::*;
use serde::Serialize;

use super::equation::EquationSpec;
use super::stepper::SolverConfig;
use super::trajectory::{evolve, max_snapshot_distance};
use crate::error::{Error, Result};
use crate::spectral::RealField;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    /// `max_t ‖u_ε(t) - u₀(t)‖_{H^s}`, absent when the member failed.
    pub error: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub alpha: f64,
    pub s: f64,
    pub final_time: f64,
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `log e` against `log ε`; `None` with fewer than
    /// four usable points or any zero error.
    pub slope: Option<f64>,
    /// Errors non-decreasing in ε. Soft check: a violation only adds a warning.
    pub monotone: bool,
    pub warnings: Vec<String>,
}

impl SweepReport {
    pub fn error_at(&self, epsilon: f64) -> Option<f64> {
        self.rows.iter().find(|r| r.epsilon == epsilon).and_then(|r| r.error)
    }

    pub fn is_complete(&self) -> bool {
        self.rows.iter().all(|r| r.error.is_some())
    }

    /// Refit the slope after discarding the `drop` largest-ε points.
    pub fn slope_dropping(&self, drop: usize) -> Option<f64> {
        fit_loglog_slope(&self.points(), drop)
    }

    fn points(&self) -> Vec<(f64, f64)> {
        self.rows.iter().filter_map(|r| r.error.map(|e| (r.epsilon, e))).collect()
    }
}

/// Ordinary least squares slope of `ln y` on `ln x`, after removing the `drop`
/// points with largest `x`. Needs four points before dropping and two after;
/// any non-positive value makes the fit undefined.
pub fn fit_loglog_slope(points: &[(f64, f64)], drop: usize) -> Option<f64> {
    if points.len() < 4 || points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return None;
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    sorted.truncate(sorted.len().saturating_sub(drop));
    if sorted.len() < 2 {
        return None;
    }
    let n = sorted.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = sorted.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

fn validate(eps: &[f64], s: f64, final_time: f64) -> Result<()> {
    if eps.len() < 4 {
        return Err(Error::param(format!("sweep needs at least 4 values of ε, got {}", eps.len())));
    }
    if eps.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
        return Err(Error::param("every ε in the sweep must lie in (0, 1]"));
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::param("ε values must be strictly decreasing"));
    }
    if eps[0] / eps[eps.len() - 1] < 100.0 * (1.0 - 1e-12) {
        return Err(Error::param("ε values must span at least two decades"));
    }
    if !(0.25..=2.0).contains(&s) {
        return Err(Error::param(format!("sweep regularity s must lie in [1/4, 2], got {s}")));
    }
    if !(final_time.is_finite() && final_time > 0.0) {
        return Err(Error::param(format!("final time must be positive, got {final_time}")));
    }
    Ok(())
}

fn members(
    initial: &RealField,
    eps: &[f64],
    alpha: f64,
    s: f64,
    final_time: f64,
    cfg: &SolverConfig,
) -> Result<Vec<Result<f64>>> {
    validate(eps, s, final_time)?;
    let reference = evolve(initial, &EquationSpec::mkdv(), final_time, cfg)?;
    Ok(eps
        .par_iter()
        .map(|&e| {
            let eq = EquationSpec::mkdv_b(e, alpha)?;
            let traj = evolve(initial, &eq, final_time, cfg)?;
            max_snapshot_distance(&traj, &reference, s)
        })
        .collect())
}

fn assemble(eps: &[f64], alpha: f64, s: f64, final_time: f64, results: Vec<Result<f64>>) -> SweepReport {
    let rows: Vec<SweepRow> = eps
        .iter()
        .zip(results)
        .map(|(&epsilon, r)| match r {
            Ok(e) => SweepRow { epsilon, error: Some(e), failure: None },
            Err(err) => SweepRow { epsilon, error: None, failure: Some(err.to_string()) },
        })
        .collect();
    let mut warnings = Vec::new();
    let errs: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.error.map(|e| (r.epsilon, e))).collect();
    // Rows run from large to small ε, so errors should not increase along them.
    let monotone = errs.windows(2).all(|w| w[1].1 <= w[0].1);
    if !monotone {
        warnings.push("sweep error is not monotone in ε".to_string());
    }
    let slope = fit_loglog_slope(&errs, 0);
    if slope.is_none() {
        warnings.push("slope undefined: fewer than four positive errors".to_string());
    }
    SweepReport { alpha, s, final_time, rows, slope, monotone, warnings }
}

/// Compare MKdV-B runs for each ε (in parallel) against the ε = 0 MKdV run
/// from the same data. Any failing member aborts the sweep with an error
/// naming its ε.
pub fn inviscid_limit_sweep(
    initial: &RealField,
    eps: &[f64],
    alpha: f64,
    s: f64,
    final_time: f64,
    cfg: &SolverConfig,
) -> Result<SweepReport> {
    let results = members(initial, eps, alpha, s, final_time, cfg)?;
    let mut values = Vec::with_capacity(results.len());
    for (&epsilon, r) in eps.iter().zip(results) {
        match r {
            Ok(v) => values.push(Ok(v)),
            Err(source) => return Err(Error::SweepMember { epsilon, source: Box::new(source) }),
        }
    }
    let results = values;
    Ok(assemble(eps, alpha, s, final_time, results))
}

/// As [`inviscid_limit_sweep`], but failing members are recorded in their row
/// and the remaining rows are kept.
pub fn inviscid_limit_sweep_partial(
    initial: &RealField,
    eps: &[f64],
    alpha: f64,
    s: f64,
    final_time: f64,
    cfg: &SolverConfig,
) -> Result<SweepReport> {
    let results = members(initial, eps, alpha, s, final_time, cfg)?;
    Ok(assemble(eps, alpha, s, final_time, results))
}
