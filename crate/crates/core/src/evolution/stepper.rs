use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::equation::EquationSpec;
use crate::error::{Error, Result};
use crate::spectral::{physical_from_coeffs, spectral_from_samples, PeriodicGrid, RealField};

/// Time-stepping parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    /// Fraction of the half-spectrum kept before products; `None` picks the
    /// family default (2/3 for quadratic, 1/2 for cubic flux).
    pub dealias_fraction: Option<f64>,
    /// Snapshot stride in steps.
    pub record_every: usize,
    /// Also record `‖Λ^{2α}u‖²` and `‖Λ^{2α+1}u‖²` every step.
    pub order2_diagnostics: bool,
}

impl SolverConfig {
    pub fn new(dt: f64) -> Self {
        Self { dt, dealias_fraction: None, record_every: 1, order2_diagnostics: false }
    }

    pub fn record_every(mut self, stride: usize) -> Self {
        self.record_every = stride;
        self
    }

    pub fn with_order2_diagnostics(mut self) -> Self {
        self.order2_diagnostics = true;
        self
    }

    pub fn with_dealias_fraction(mut self, fraction: f64) -> Self {
        self.dealias_fraction = Some(fraction);
        self
    }

    pub(crate) fn validate(&self, grid: &PeriodicGrid, eq: &EquationSpec) -> Result<f64> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param(format!("dt must be positive, got {}", self.dt)));
        }
        if self.record_every == 0 {
            return Err(Error::param("record_every must be at least 1"));
        }
        let fraction = self
            .dealias_fraction
            .unwrap_or_else(|| eq.family().default_dealias_fraction());
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::param(format!("dealias fraction must lie in (0, 1], got {fraction}")));
        }
        if fraction * ((grid.points() / 2) as f64) < 4.0 {
            return Err(Error::param(format!(
                "dealias fraction {fraction} keeps fewer than 4 modes on N = {}",
                grid.points()
            )));
        }
        Ok(fraction)
    }
}

/// `0.5·Δx/(1+max|u|)^p`, `p` the flux power minus one.
pub fn default_dt(grid: &PeriodicGrid, initial_max: f64, eq: &EquationSpec) -> f64 {
    let p = eq.family().power() as i32 - 1;
    0.5 * grid.dx() / (1.0 + initial_max).powi(p)
}

/// Integrating-factor RK4 for `û_t = L(ξ)û + N̂(û)`, with `L = iξ³ - ε|ξ|^{2α}`
/// integrated exactly and only the flux stepped explicitly.
pub(crate) struct Integrator {
    grid: PeriodicGrid,
    dt: f64,
    keep: Vec<bool>,
    /// `c·iξ` on retained modes, zero elsewhere.
    flux_symbol: Vec<Complex64>,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
    power: u32,
}

impl Integrator {
    pub(crate) fn new(grid: &PeriodicGrid, eq: &EquationSpec, dt: f64, fraction: f64) -> Self {
        let cutoff = fraction * (grid.points() / 2) as f64;
        let keep: Vec<bool> = (0..grid.points())
            .map(|i| (grid.mode(i).unsigned_abs() as f64) < cutoff)
            .collect();
        let c = eq.family().flux_coefficient();
        let flux_symbol = (0..grid.points())
            .map(|i| {
                if keep[i] {
                    Complex64::new(0.0, c * grid.wavenumber(i))
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        let mut half = Vec::with_capacity(grid.points());
        let mut full = Vec::with_capacity(grid.points());
        for i in 0..grid.points() {
            let l = eq.linear_symbol(grid.wavenumber(i));
            half.push((l * (0.5 * dt)).exp());
            full.push((l * dt).exp());
        }
        let nyq = grid.nyquist_index();
        half[nyq] = Complex64::new(0.0, 0.0);
        full[nyq] = Complex64::new(0.0, 0.0);
        Self { grid: grid.clone(), dt, keep, flux_symbol, half, full, power: eq.family().power() }
    }

    pub(crate) fn dt(&self) -> f64 {
        self.dt
    }

    /// `c·∂_x P[(P u)^p]` in coefficient space.
    pub(crate) fn flux(&self, u: &[Complex64]) -> Vec<Complex64> {
        let projected: Vec<Complex64> = u
            .iter()
            .zip(&self.keep)
            .map(|(c, &k)| if k { *c } else { Complex64::new(0.0, 0.0) })
            .collect();
        let mut samples = physical_from_coeffs(&self.grid, &projected);
        let p = self.power as i32;
        for v in samples.iter_mut() {
            *v = v.powi(p);
        }
        let mut out = spectral_from_samples(&self.grid, &samples);
        for (c, s) in out.iter_mut().zip(&self.flux_symbol) {
            *c *= s;
        }
        out
    }

    pub(crate) fn step(&self, u: &[Complex64]) -> Vec<Complex64> {
        let h = self.dt;
        let n = u.len();
        let k1 = self.flux(u);
        let stage: Vec<Complex64> = (0..n).map(|i| self.half[i] * (u[i] + 0.5 * h * k1[i])).collect();
        let k2 = self.flux(&stage);
        let stage: Vec<Complex64> = (0..n).map(|i| self.half[i] * u[i] + 0.5 * h * k2[i]).collect();
        let k3 = self.flux(&stage);
        let stage: Vec<Complex64> =
            (0..n).map(|i| self.full[i] * u[i] + h * self.half[i] * k3[i]).collect();
        let k4 = self.flux(&stage);
        (0..n)
            .map(|i| {
                self.full[i] * u[i]
                    + h / 6.0
                        * (self.full[i] * k1[i] + 2.0 * self.half[i] * (k2[i] + k3[i]) + k4[i])
            })
            .collect()
    }
}

/// The flux `N(u)` of the chosen family, with the family's default dealiasing.
pub fn nonlinear_rhs(u: &RealField, eq: &EquationSpec) -> RealField {
    let grid = u.grid();
    let integrator = Integrator::new(grid, eq, 1.0, eq.family().default_dealias_fraction());
    let coeffs = spectral_from_samples(grid, u.samples());
    let samples = physical_from_coeffs(grid, &integrator.flux(&coeffs));
    RealField::from_parts_unchecked(grid.clone(), samples)
}

/// One integrating-factor RK4 step of size `cfg.dt`.
pub fn step(u: &RealField, eq: &EquationSpec, cfg: &SolverConfig) -> Result<RealField> {
    let grid = u.grid();
    let fraction = cfg.validate(grid, eq)?;
    let integrator = Integrator::new(grid, eq, cfg.dt, fraction);
    let next = integrator.step(&spectral_from_samples(grid, u.samples()));
    let samples = physical_from_coeffs(grid, &next);
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::BlowUp { time: cfg.dt, reason: "non-finite state".into(), partial: None });
    }
    Ok(RealField::from_parts_unchecked(grid.clone(), samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::Family;
    use crate::spectral::{airy_evolve, forward_transform, inverse_transform};
    use std::f64::consts::PI;

    fn unit(n: usize, f: impl Fn(f64) -> f64) -> RealField {
        RealField::from_fn(PeriodicGrid::new(2.0 * PI, n).unwrap(), f).unwrap()
    }

    fn all_families() -> Vec<EquationSpec> {
        vec![
            EquationSpec::kdv(),
            EquationSpec::kdv_b(0.3, 0.5).unwrap(),
            EquationSpec::mkdv(),
            EquationSpec::mkdv_b(0.3, 0.5).unwrap(),
        ]
    }

    #[test]
    fn constant_has_no_flux() {
        let u = unit(32, |_| 1.7);
        for eq in all_families() {
            assert!(nonlinear_rhs(&u, &eq).max_abs() < 1e-13, "{:?}", eq.family());
        }
    }

    #[test]
    fn mkdv_flux_of_cosine() {
        // 2∂_x(cos³x) = -6cos²x sin x, expanded as -(3/2)(sin x + sin 3x)... checked pointwise.
        let u = unit(32, f64::cos);
        let n = nonlinear_rhs(&u, &EquationSpec::mkdv());
        for (x, v) in u.grid().xs().iter().zip(n.samples()) {
            let oracle = -1.5 * (x.sin() + (3.0 * x).sin());
            assert!((v - oracle).abs() < 1e-10, "x = {x}");
            assert!((oracle + 6.0 * x.cos().powi(2) * x.sin()).abs() < 1e-12);
        }
        let nb = nonlinear_rhs(&u, &EquationSpec::mkdv_b(0.5, 1.0).unwrap());
        assert_eq!(n.samples(), nb.samples());
    }

    #[test]
    fn flux_has_zero_mean() {
        let u = unit(64, |x| (x.sin()).exp() - 0.4 * (2.0 * x).cos());
        for eq in all_families() {
            let n = nonlinear_rhs(&u, &eq);
            assert!(n.integral().abs() < 1e-12);
        }
    }

    #[test]
    fn kdv_coefficients() {
        let u = unit(32, f64::cos);
        // 3(cos²)_x = -3 sin 2x, 2(cos²)_x = -2 sin 2x
        let k = nonlinear_rhs(&u, &EquationSpec::kdv());
        let kb = nonlinear_rhs(&u, &EquationSpec::kdv_b(0.1, 1.0).unwrap());
        for (x, (a, b)) in u.grid().xs().iter().zip(k.samples().iter().zip(kb.samples())) {
            assert!((a + 3.0 * (2.0 * x).sin()).abs() < 1e-12);
            assert!((b + 2.0 * (2.0 * x).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_field_stays_zero() {
        let u = unit(32, |_| 0.0);
        for eq in all_families() {
            let next = step(&u, &eq, &SolverConfig::new(0.1)).unwrap();
            assert_eq!(next.max_abs(), 0.0);
        }
    }

    #[test]
    fn tiny_amplitude_step_is_linear() {
        let u = unit(32, |x| 1e-8 * x.cos());
        let dt = 0.05;
        let next = step(&u, &EquationSpec::mkdv(), &SolverConfig::new(dt)).unwrap();
        let linear = inverse_transform(&airy_evolve(&forward_transform(&u), dt)).unwrap();
        let gap = next.difference(&linear).unwrap().max_abs();
        assert!(gap < 1e-18, "gap {gap:e}");
    }

    #[test]
    fn config_validation() {
        let grid = PeriodicGrid::new(1.0, 16).unwrap();
        let eq = EquationSpec::mkdv();
        assert!(SolverConfig::new(0.0).validate(&grid, &eq).is_err());
        assert!(SolverConfig::new(0.1).record_every(0).validate(&grid, &eq).is_err());
        // 0.25·8 = 2 retained modes is too few.
        assert!(SolverConfig::new(0.1).with_dealias_fraction(0.25).validate(&grid, &eq).is_err());
        assert_eq!(SolverConfig::new(0.1).validate(&grid, &eq).unwrap(), 0.5);
        assert!(matches!(Family::Kdv.default_dealias_fraction(), f if (f - 2.0 / 3.0).abs() < 1e-15));
    }
}
