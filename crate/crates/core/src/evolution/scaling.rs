use num_complex::Complex64;
use serde::Serialize;

use super::equation::EquationSpec;
use super::stepper::SolverConfig;
use super::trajectory::evolve;
use crate::error::{Error, Result};
use crate::spectral::{physical_from_coeffs, spectral_from_samples, PeriodicGrid, RealField};

/// Dissipation coefficient of the rescaled problem `λu(λx, λ³t)`.
///
/// `∂_t`, `∂_x³` and `(u³)_x` all pick up `λ⁴`, while `|∂|^{2α}` only picks up
/// `λ^{1+2α}`, so ε must be multiplied by `λ^{3-2α}`.
pub fn scaled_dissipation(epsilon: f64, alpha: f64, lambda: f64) -> f64 {
    lambda.powf(3.0 - 2.0 * alpha) * epsilon
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub lambda: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub epsilon_scaled: f64,
    /// Unit-scale snapshot times; the scaled run is compared at `t/λ³`.
    pub times: Vec<f64>,
    /// `L²` distance on the scaled domain at each snapshot.
    pub discrepancies: Vec<f64>,
    pub sup: f64,
}

/// Solve the unit problem on φ's grid and the rescaled problem on a grid of
/// length `L/λ` with the same number of points, and compare.
pub fn scaling_check(
    initial: &RealField,
    lambda: f64,
    epsilon: f64,
    alpha: f64,
    final_time: f64,
    cfg: &SolverConfig,
) -> Result<ScalingReport> {
    scaling_check_on(initial, lambda, epsilon, alpha, final_time, cfg, initial.grid().points())
}

/// As [`scaling_check`], with `points ≥ N` on the rescaled grid. The unit
/// solution is interpolated spectrally (zero-padded) onto that grid.
pub fn scaling_check_on(
    initial: &RealField,
    lambda: f64,
    epsilon: f64,
    alpha: f64,
    final_time: f64,
    cfg: &SolverConfig,
    points: usize,
) -> Result<ScalingReport> {
    run(initial, lambda, epsilon, alpha, scaled_dissipation(epsilon, alpha, lambda), final_time, cfg, points)
}

fn equation(epsilon: f64, alpha: f64) -> Result<EquationSpec> {
    if epsilon == 0.0 {
        Ok(EquationSpec::mkdv())
    } else {
        EquationSpec::mkdv_b(epsilon, alpha)
    }
}

#[allow(clippy::too_many_arguments)]
fn run(
    initial: &RealField,
    lambda: f64,
    epsilon: f64,
    alpha: f64,
    epsilon_scaled: f64,
    final_time: f64,
    cfg: &SolverConfig,
    points: usize,
) -> Result<ScalingReport> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::param(format!("λ must lie in (0, 1], got {lambda}")));
    }
    if !(final_time.is_finite() && final_time > 0.0) {
        return Err(Error::param(format!("final time must be positive, got {final_time}")));
    }
    let unit_grid = initial.grid().clone();
    if points < unit_grid.points() {
        return Err(Error::param(format!(
            "scaled grid has {points} points, fewer than the unit grid's {}",
            unit_grid.points()
        )));
    }
    let scaled_grid = PeriodicGrid::new(unit_grid.length() / lambda, points)?;
    let unit_eq = equation(epsilon, alpha)?;
    let scaled_eq = equation(epsilon_scaled, alpha)?;

    let steps = ((final_time / cfg.dt) - 1e-9).ceil().max(1.0);
    let dt = final_time / steps;
    let unit_cfg = SolverConfig { dt, ..cfg.clone() };
    let scaled_cfg = SolverConfig { dt: dt / lambda.powi(3), ..cfg.clone() };

    // Mode m of λφ(λ·) on the long box carries the same coefficient as mode m of φ.
    let pad = |coeffs: &[Complex64]| -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); points];
        for (i, c) in coeffs.iter().enumerate() {
            if i == unit_grid.nyquist_index() {
                continue;
            }
            if let Some(j) = scaled_grid.index_of_mode(unit_grid.mode(i)) {
                out[j] = *c;
            }
        }
        out
    };
    let scaled_initial = RealField::new(
        scaled_grid.clone(),
        physical_from_coeffs(&scaled_grid, &pad(&spectral_from_samples(&unit_grid, initial.samples()))),
    )?;

    let unit = evolve(initial, &unit_eq, final_time, &unit_cfg)?;
    let scaled = evolve(&scaled_initial, &scaled_eq, final_time / lambda.powi(3), &scaled_cfg)?;
    if unit.len() != scaled.len() {
        return Err(Error::param("unit and scaled runs recorded different snapshot counts"));
    }

    let mut discrepancies = Vec::with_capacity(unit.len());
    for (u, w) in unit.fields().iter().zip(scaled.fields()) {
        let expected = pad(&spectral_from_samples(&unit_grid, u.samples()));
        let got = spectral_from_samples(&scaled_grid, w.samples());
        let sum: f64 = expected.iter().zip(&got).map(|(a, b)| (a - b).norm_sqr()).sum();
        discrepancies.push((sum / scaled_grid.length()).sqrt());
    }
    let sup = discrepancies.iter().cloned().fold(0.0, f64::max);
    Ok(ScalingReport {
        lambda,
        alpha,
        epsilon,
        epsilon_scaled,
        times: unit.times().to_vec(),
        discrepancies,
        sup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn data(n: usize) -> RealField {
        let grid = PeriodicGrid::new(32.0 * PI, n).unwrap();
        RealField::from_fn(grid, |x| 0.5 * (-x * x / 8.0).exp()).unwrap()
    }

    #[test]
    fn identity_scaling_is_exact() {
        let r = scaling_check(&data(256), 1.0, 0.01, 1.0, 0.5, &SolverConfig::new(0.01)).unwrap();
        assert_eq!(r.epsilon_scaled, 0.01);
        assert!(r.sup < 1e-12, "{}", r.sup);
    }

    #[test]
    fn zero_data_has_no_discrepancy() {
        let grid = PeriodicGrid::new(32.0 * PI, 128).unwrap();
        let r = scaling_check(&RealField::zeros(grid), 0.5, 0.1, 0.5, 0.5, &SolverConfig::new(0.01)).unwrap();
        assert_eq!(r.sup, 0.0);
    }

    #[test]
    fn half_scaling_holds_with_corrected_exponent() {
        let phi = data(256);
        let cfg = SolverConfig::new(0.01).record_every(10);
        let good = scaling_check(&phi, 0.5, 0.01, 1.0, 0.5, &cfg).unwrap();
        assert!(good.sup < 1e-10, "{}", good.sup);
        // A finer scaled grid keeps more modes through dealiasing, so the two
        // runs only agree up to the unit grid's truncation error.
        let padded = scaling_check_on(&data(512), 0.5, 0.01, 1.0, 0.5, &cfg, 1024).unwrap();
        assert!(padded.sup < 1e-8, "{}", padded.sup);

        // λ^{4-2α} instead of λ^{3-2α} gives a visibly different solution.
        let wrong = run(&phi, 0.5, 0.01, 1.0, 0.5f64.powf(2.0) * 0.01, 0.5, &cfg, 256).unwrap();
        assert!(wrong.sup > 1e3 * good.sup.max(1e-14), "{} vs {}", wrong.sup, good.sup);
    }

    #[test]
    fn parameter_errors() {
        let phi = data(64);
        let cfg = SolverConfig::new(0.01);
        assert!(scaling_check(&phi, 0.0, 0.0, 1.0, 0.1, &cfg).is_err());
        assert!(scaling_check(&phi, 1.5, 0.0, 1.0, 0.1, &cfg).is_err());
        assert!(scaling_check_on(&phi, 0.5, 0.0, 1.0, 0.1, &cfg, 32).is_err());
    }
}
