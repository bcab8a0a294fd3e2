use num_complex::Complex64;
use serde::Serialize;

use super::equation::EquationSpec;
use super::stepper::{Integrator, SolverConfig};
use crate::error::{Error, Result};
use crate::spectral::{
    physical_from_coeffs, spectral_from_samples, weighted_l2, fractional_power, PeriodicGrid,
    RealField, SpectralField,
};

/// A run is declared blown up once `max|u|` exceeds this multiple of the initial maximum.
pub const BLOW_UP_FACTOR: f64 = 1e6;

/// `‖Λ^order u(t)‖₂²` sampled at every step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DissipationSeries {
    pub order: f64,
    pub values: Vec<f64>,
}

/// Time-ordered snapshots of a solution plus per-step dissipation integrands.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    equation: EquationSpec,
    grid: PeriodicGrid,
    dt: f64,
    steps: usize,
    times: Vec<f64>,
    fields: Vec<RealField>,
    step_times: Vec<f64>,
    dissipation: Vec<DissipationSeries>,
    max_hermitian_defect: f64,
}

impl Trajectory {
    pub fn equation(&self) -> &EquationSpec {
        &self.equation
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    /// Step size actually used (`T / steps`).
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[RealField] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn initial(&self) -> &RealField {
        &self.fields[0]
    }

    pub fn last(&self) -> &RealField {
        self.fields.last().expect("trajectory holds at least the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    /// Times at which dissipation integrands were sampled (every step).
    pub fn step_times(&self) -> &[f64] {
        &self.step_times
    }

    pub fn dissipation(&self) -> &[DissipationSeries] {
        &self.dissipation
    }

    pub fn dissipation_at(&self, order: f64) -> Option<&DissipationSeries> {
        self.dissipation.iter().find(|s| (s.order - order).abs() < 1e-12)
    }

    /// Worst relative Hermitian defect of the state over all steps; the state
    /// is real as long as this stays at round-off level.
    pub fn max_hermitian_defect(&self) -> f64 {
        self.max_hermitian_defect
    }

    /// `|‖u(T)‖² - ‖φ‖² + 2ε∫₀ᵀ‖Λ^α u‖² dτ| / ‖φ‖²`, trapezoid in time.
    pub fn l2_balance_residual(&self) -> f64 {
        let start = self.initial().l2_norm().powi(2);
        if start == 0.0 {
            return 0.0;
        }
        let end = self.last().l2_norm().powi(2);
        let dissipated = match self.dissipation_at(self.equation.alpha()) {
            Some(series) if self.equation.epsilon() > 0.0 => {
                2.0 * self.equation.epsilon() * trapezoid(&self.step_times, &series.values)
            }
            _ => 0.0,
        };
        (end - start + dissipated).abs() / start
    }
}

pub(crate) fn trapezoid(t: &[f64], y: &[f64]) -> f64 {
    t.windows(2)
        .zip(y.windows(2))
        .map(|(tw, yw)| 0.5 * (tw[1] - tw[0]) * (yw[0] + yw[1]))
        .sum()
}

fn dissipation_orders(eq: &EquationSpec, cfg: &SolverConfig) -> Vec<f64> {
    let a = eq.alpha();
    if cfg.order2_diagnostics {
        vec![a, 2.0 * a, 2.0 * a + 1.0]
    } else {
        vec![a]
    }
}

fn hermitian_defect(coeffs: &[Complex64]) -> f64 {
    let scale = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
    if scale == 0.0 {
        return 0.0;
    }
    let n = coeffs.len();
    let mut worst = coeffs[0].im.abs();
    for i in 1..n / 2 {
        worst = worst.max((coeffs[i] - coeffs[n - i].conj()).norm());
    }
    worst / scale
}

/// Solve on `[0, T]`. `T/dt` is rounded up to an integer step count and `dt`
/// shrunk to fit. Snapshots are kept every `record_every` steps and at `T`.
pub fn evolve(
    initial: &RealField,
    eq: &EquationSpec,
    final_time: f64,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    let grid = initial.grid().clone();
    let fraction = cfg.validate(&grid, eq)?;
    if !(final_time.is_finite() && final_time >= 0.0) {
        return Err(Error::param(format!("final time must be non-negative, got {final_time}")));
    }
    let steps = if final_time == 0.0 {
        0
    } else {
        ((final_time / cfg.dt) - 1e-9).ceil().max(1.0) as usize
    };
    let dt = if steps == 0 { cfg.dt } else { final_time / steps as f64 };
    let integrator = Integrator::new(&grid, eq, dt, fraction);

    let orders = dissipation_orders(eq, cfg);
    let weights: Vec<Vec<f64>> = orders
        .iter()
        .map(|&o| grid.wavenumbers().iter().map(|&xi| fractional_power(xi, 2.0 * o)).collect())
        .collect();
    let sample = |coeffs: &[Complex64], w: &[f64]| -> f64 {
        let sum: f64 = coeffs.iter().zip(w).map(|(c, wi)| wi * c.norm_sqr()).sum();
        sum / grid.length()
    };

    let mut traj = Trajectory {
        equation: *eq,
        grid: grid.clone(),
        dt,
        steps,
        times: vec![0.0],
        fields: vec![initial.clone()],
        step_times: vec![0.0],
        dissipation: orders.iter().map(|&order| DissipationSeries { order, values: Vec::new() }).collect(),
        max_hermitian_defect: 0.0,
    };

    let mut state = spectral_from_samples(&grid, initial.samples());
    traj.max_hermitian_defect = hermitian_defect(&state);
    for (series, w) in traj.dissipation.iter_mut().zip(&weights) {
        series.values.push(sample(&state, w));
    }
    let threshold = BLOW_UP_FACTOR * initial.max_abs().max(f64::MIN_POSITIVE);

    for n in 1..=steps {
        state = integrator.step(&state);
        let t = if n == steps { final_time } else { n as f64 * dt };
        let samples = physical_from_coeffs(&grid, &state);
        let peak = samples.iter().fold(0.0_f64, |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) });
        if !peak.is_finite() || peak > threshold {
            let reason = if peak.is_finite() {
                format!("max|u| = {peak:.3e} exceeds {BLOW_UP_FACTOR:.0e} × initial maximum")
            } else {
                "non-finite state".to_string()
            };
            return Err(Error::BlowUp { time: t, reason, partial: Some(Box::new(traj)) });
        }
        traj.max_hermitian_defect = traj.max_hermitian_defect.max(hermitian_defect(&state));
        traj.step_times.push(t);
        for (series, w) in traj.dissipation.iter_mut().zip(&weights) {
            series.values.push(sample(&state, w));
        }
        if n % cfg.record_every == 0 || n == steps {
            traj.times.push(t);
            traj.fields.push(RealField::from_parts_unchecked(grid.clone(), samples));
        }
    }
    debug_assert!(integrator.dt() > 0.0);
    Ok(traj)
}

/// Halve `dt` (at most eight times) until the `L²` balance residual of a run
/// to `T` drops below `tolerance`. Returns the accepted step.
pub fn calibrate_dt(
    initial: &RealField,
    eq: &EquationSpec,
    final_time: f64,
    cfg: &SolverConfig,
    tolerance: f64,
) -> Result<f64> {
    let mut trial = cfg.clone();
    let mut last = f64::NAN;
    for _ in 0..=8 {
        match evolve(initial, eq, final_time, &trial) {
            Ok(traj) => {
                last = traj.l2_balance_residual();
                if last < tolerance {
                    return Ok(trial.dt);
                }
            }
            Err(Error::BlowUp { .. }) => {}
            Err(e) => return Err(e),
        }
        trial.dt *= 0.5;
    }
    Err(Error::diag(format!("L² balance {last:e} still above {tolerance:e} at dt = {}", trial.dt * 2.0)))
}

/// Largest `H^s` distance between two trajectories recorded at the same times.
pub(crate) fn max_snapshot_distance(a: &Trajectory, b: &Trajectory, s: f64) -> Result<f64> {
    if a.grid != b.grid || a.times.len() != b.times.len() {
        return Err(Error::param("trajectories are not recorded on matching grids and times"));
    }
    let mut worst = 0.0_f64;
    for ((fa, fb), (ta, tb)) in a.fields.iter().zip(&b.fields).zip(a.times.iter().zip(&b.times)) {
        if (ta - tb).abs() > 1e-9 * (1.0 + ta.abs()) {
            return Err(Error::param(format!("snapshot times differ: {ta} vs {tb}")));
        }
        let diff: Vec<f64> = fa.samples().iter().zip(fb.samples()).map(|(x, y)| x - y).collect();
        let coeffs = spectral_from_samples(&a.grid, &diff);
        let field = SpectralField::from_parts_unchecked(a.grid.clone(), coeffs);
        worst = worst.max(weighted_l2(&field, |xi| (1.0 + xi * xi).powf(s)));
    }
    Ok(worst)
}
