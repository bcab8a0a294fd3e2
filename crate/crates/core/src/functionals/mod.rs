//! Conserved and dissipated quantities, Gagliardo–Nirenberg ratios and the
//! Miura map from MKdV to KdV.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{trapezoid, Family, Trajectory};
use crate::spectral::{physical_from_coeffs, spectral_from_samples, PeriodicGrid, RealField};

/// Width of the edge strip, as a fraction of `L`, used for boundary certificates.
pub const BOUNDARY_FRACTION: f64 = 0.05;

struct Padded {
    grid: PeriodicGrid,
    coeffs: Vec<Complex64>,
}

impl Padded {
    fn new(u: &RealField) -> Self {
        let grid = u.grid().clone();
        let coeffs = spectral_from_samples(&grid, u.samples());
        Self { grid, coeffs }
    }

    fn from_coeffs(grid: &PeriodicGrid, coeffs: Vec<Complex64>) -> Self {
        Self { grid: grid.clone(), coeffs }
    }

    /// `(iξ)^k û` with the Nyquist mode dropped.
    fn derivative(&self, order: u32) -> Vec<Complex64> {
        let ny = self.grid.nyquist_index();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i == ny {
                    Complex64::new(0.0, 0.0)
                } else {
                    c * Complex64::new(0.0, self.grid.wavenumber(i)).powu(order)
                }
            })
            .collect()
    }

    /// `∫|∂^k u|² dx` by Parseval.
    fn energy(&self, order: u32) -> f64 {
        let sum: f64 = self.derivative(order).iter().map(|c| c.norm_sqr()).sum();
        sum / self.grid.length()
    }

    /// Samples of `∂^k u` on the grid with twice as many points.
    fn fine_samples(&self, order: u32) -> (PeriodicGrid, Vec<f64>) {
        let fine = self.grid.with_points(2 * self.grid.points()).expect("doubling a valid grid");
        let d = self.derivative(order);
        let mut out = vec![Complex64::new(0.0, 0.0); fine.points()];
        for (i, c) in d.iter().enumerate() {
            if let Some(j) = fine.index_of_mode(self.grid.mode(i)) {
                out[j] = *c;
            }
        }
        let samples = physical_from_coeffs(&fine, &out);
        (fine, samples)
    }
}

fn fine_integral(grid: &PeriodicGrid, values: impl Iterator<Item = f64>) -> f64 {
    values.sum::<f64>() * grid.dx()
}

/// `∫ u_x² + u⁴ + u² dx`, conserved by `u_t + u_xxx = 2(u³)_x`.
pub fn h1_mkdv(u: &RealField) -> f64 {
    let p = Padded::new(u);
    let (fine, v) = p.fine_samples(0);
    p.energy(1) + fine_integral(&fine, v.iter().map(|x| x.powi(4))) + p.energy(0)
}

/// `∫ u_x² + 2u³ dx`, conserved by `u_t + u_xxx = 3(u²)_x`.
pub fn h1_kdv(u: &RealField) -> f64 {
    let p = Padded::new(u);
    let (fine, v) = p.fine_samples(0);
    p.energy(1) + 2.0 * fine_integral(&fine, v.iter().map(|x| x.powi(3)))
}

/// `∫ u_xx² + 10u²u_x² + 2u⁶ dx`.
pub fn h2_mkdv(u: &RealField) -> f64 {
    let p = Padded::new(u);
    let (fine, v) = p.fine_samples(0);
    let (_, vx) = p.fine_samples(1);
    let mixed = fine_integral(&fine, v.iter().zip(&vx).map(|(a, b)| 10.0 * a * a * b * b));
    p.energy(2) + mixed + 2.0 * fine_integral(&fine, v.iter().map(|x| x.powi(6)))
}

/// `h2_mkdv(u) + ‖u‖₂²`.
pub fn h2p_mkdv(u: &RealField) -> f64 {
    h2_mkdv(u) + Padded::new(u).energy(0)
}

/// Quantities that can be tracked along a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    L2Norm,
    H1Mkdv,
    H1Kdv,
    H2Mkdv,
    H2pMkdv,
}

impl Functional {
    pub const ALL: [Functional; 5] =
        [Functional::L2Norm, Functional::H1Mkdv, Functional::H1Kdv, Functional::H2Mkdv, Functional::H2pMkdv];

    pub fn name(self) -> &'static str {
        match self {
            Functional::L2Norm => "l2_norm",
            Functional::H1Mkdv => "h1_mkdv",
            Functional::H1Kdv => "h1_kdv",
            Functional::H2Mkdv => "h2_mkdv",
            Functional::H2pMkdv => "h2p_mkdv",
        }
    }

    pub fn eval(self, u: &RealField) -> f64 {
        match self {
            Functional::L2Norm => Padded::new(u).energy(0).sqrt(),
            Functional::H1Mkdv => h1_mkdv(u),
            Functional::H1Kdv => h1_kdv(u),
            Functional::H2Mkdv => h2_mkdv(u),
            Functional::H2pMkdv => h2p_mkdv(u),
        }
    }
}

/// A functional evaluated at every snapshot of a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalReport {
    pub name: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// `max_t |v(t) - v(0)| / (1 + |v(0)|)`
    pub drift: f64,
    /// Residual of the exact `L²` balance law; only set for [`Functional::L2Norm`].
    pub budget_residual: Option<f64>,
    /// Largest `|u|` near the box edge over all snapshots.
    pub boundary_decay: f64,
}

impl FunctionalReport {
    pub fn along(traj: &Trajectory, functional: Functional) -> Result<Self> {
        let values: Vec<f64> = traj.fields().iter().map(|u| functional.eval(u)).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::diag(format!("{} is not finite along the trajectory", functional.name())));
        }
        let v0 = values[0];
        let drift = values.iter().fold(0.0_f64, |m, v| m.max((v - v0).abs())) / (1.0 + v0.abs());
        let budget_residual = (functional == Functional::L2Norm).then(|| traj.l2_balance_residual());
        let boundary_decay =
            traj.fields().iter().fold(0.0_f64, |m, u| m.max(u.boundary_decay(BOUNDARY_FRACTION)));
        Ok(Self {
            name: functional.name().to_string(),
            times: traj.times().to_vec(),
            values,
            drift,
            budget_residual,
            boundary_decay,
        })
    }
}

/// `ε^{1/2}(∫₀ᵀ ‖Λ^σ u‖₂² dτ)^{1/2}` from the per-step samples.
pub fn dissipation_budget(traj: &Trajectory, sigma: f64) -> Result<f64> {
    let eps = traj.equation().epsilon();
    if eps == 0.0 {
        return Ok(0.0);
    }
    let series = traj.dissipation_at(sigma).ok_or_else(|| {
        Error::diag(format!(
            "trajectory carries no dissipation samples at order {sigma}; available: {:?}",
            traj.dissipation().iter().map(|s| s.order).collect::<Vec<_>>()
        ))
    })?;
    Ok((eps * trapezoid(traj.step_times(), &series.values)).sqrt())
}

/// `(‖u‖₆⁶ / (‖u‖₂⁴‖u_x‖₂²), ‖u‖₄⁴ / (‖u‖₂³‖u_x‖₂))`.
pub fn gn_ratios(u: &RealField) -> Result<(f64, f64)> {
    let p = Padded::new(u);
    let l2 = p.energy(0);
    let dx = p.energy(1);
    if l2 == 0.0 {
        return Err(Error::diag("Gagliardo–Nirenberg ratios are undefined for the zero field"));
    }
    if dx == 0.0 {
        return Err(Error::diag("Gagliardo–Nirenberg ratios are undefined when u_x = 0"));
    }
    let (fine, v) = p.fine_samples(0);
    let l6 = fine_integral(&fine, v.iter().map(|x| x.powi(6)));
    let l4 = fine_integral(&fine, v.iter().map(|x| x.powi(4)));
    let r6 = l6 / (l2 * l2 * dx);
    let r4 = l4 / (l2.powf(1.5) * dx.sqrt());
    if !(r6.is_finite() && r4.is_finite()) {
        return Err(Error::diag("Gagliardo–Nirenberg ratio is not finite"));
    }
    Ok((r6, r4))
}

/// Coefficients of `v²`, formed on the doubled grid and truncated back.
fn square_coeffs(p: &Padded) -> Vec<Complex64> {
    let (fine, v) = p.fine_samples(0);
    let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
    let fine_coeffs = spectral_from_samples(&fine, &sq);
    let mut out = vec![Complex64::new(0.0, 0.0); p.grid.points()];
    for (i, c) in out.iter_mut().enumerate() {
        if i == p.grid.nyquist_index() {
            continue;
        }
        *c = fine_coeffs[fine.index_of_mode(p.grid.mode(i)).expect("coarse mode fits the fine grid")];
    }
    out
}

/// `v ↦ v_x + v²`.
pub fn miura_transform(v: &RealField) -> RealField {
    let p = Padded::new(v);
    let mut coeffs = p.derivative(1);
    for (c, s) in coeffs.iter_mut().zip(square_coeffs(&p)) {
        *c += s;
    }
    RealField::from_parts_unchecked(p.grid.clone(), physical_from_coeffs(&p.grid, &coeffs))
}

/// Worst `L²` norm over interior snapshots of `∂_t w + w_xxx - 3(w²)_x` with
/// `w` the Miura image of the snapshot. `∂_t` is the three-point second-order
/// difference (non-uniform spacing allowed); spatial terms are spectral.
pub fn miura_consistency(traj: &Trajectory) -> Result<f64> {
    if traj.equation().family() != Family::Mkdv {
        return Err(Error::diag(format!(
            "Miura consistency needs an MKdV trajectory, got {}",
            traj.equation().family()
        )));
    }
    if traj.len() < 3 {
        return Err(Error::diag(format!("need at least 3 snapshots, got {}", traj.len())));
    }
    let grid = traj.grid();
    let w: Vec<Vec<Complex64>> = traj
        .fields()
        .iter()
        .map(|v| spectral_from_samples(grid, miura_transform(v).samples()))
        .collect();
    let t = traj.times();
    let mut worst = 0.0_f64;
    for n in 1..t.len() - 1 {
        let (h1, h2) = (t[n] - t[n - 1], t[n + 1] - t[n]);
        let (a, b, c) = (-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2)));
        let p = Padded::from_coeffs(grid, w[n].clone());
        let wxxx = p.derivative(3);
        let sq = Padded::from_coeffs(grid, square_coeffs(&p)).derivative(1);
        let mut sum = 0.0;
        for i in 0..grid.points() {
            let r = a * w[n - 1][i] + b * w[n][i] + c * w[n + 1][i] + wxxx[i] - 3.0 * sq[i];
            sum += r.norm_sqr();
        }
        worst = worst.max((sum / grid.length()).sqrt());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{evolve, EquationSpec, SolverConfig};
    use std::f64::consts::PI;

    fn cosine(n: usize) -> RealField {
        RealField::from_fn(PeriodicGrid::new(2.0 * PI, n).unwrap(), f64::cos).unwrap()
    }

    #[test]
    fn zero_field_values() {
        let z = RealField::zeros(PeriodicGrid::new(5.0, 32).unwrap());
        for f in Functional::ALL {
            assert_eq!(f.eval(&z), 0.0);
        }
        assert!(gn_ratios(&z).is_err());
        assert_eq!(miura_transform(&z).max_abs(), 0.0);
    }

    #[test]
    fn cosine_closed_forms() {
        let u = cosine(32);
        // ∫cos² = π, ∫sin² = π, ∫cos⁴ = 3π/4, ∫cos³ = 0, ∫cos²sin² = π/4, ∫cos⁶ = 5π/8
        assert!((h1_mkdv(&u) - (PI + 0.75 * PI + PI)).abs() < 1e-12);
        assert!((h1_kdv(&u) - PI).abs() < 1e-12);
        assert!((h2_mkdv(&u) - 19.0 * PI / 4.0).abs() < 1e-12);
        assert!((h2p_mkdv(&u) - 23.0 * PI / 4.0).abs() < 1e-12);
        let (r6, r4) = gn_ratios(&u).unwrap();
        assert!((r6 - 5.0 / (8.0 * PI * PI)).abs() < 1e-12);
        assert!((r4 - 3.0 / (4.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn constant_has_undefined_ratio() {
        let c = RealField::from_fn(PeriodicGrid::new(5.0, 32).unwrap(), |_| 1.5).unwrap();
        assert!(matches!(gn_ratios(&c), Err(Error::Diagnostic(_))));
    }

    #[test]
    fn miura_of_cosine_and_constant() {
        let u = cosine(32);
        let m = miura_transform(&u);
        for (n, v) in m.samples().iter().enumerate() {
            let x = u.grid().x(n);
            assert!((v - (-x.sin() + x.cos().powi(2))).abs() < 1e-12);
        }
        let c = RealField::from_fn(PeriodicGrid::new(5.0, 32).unwrap(), |_| -0.7).unwrap();
        assert!(miura_transform(&c).samples().iter().all(|v| (v - 0.49).abs() < 1e-14));
    }

    #[test]
    fn gn_ratios_are_scale_invariant() {
        // u ↦ λu(λx) on a box shrunk by λ keeps the same Fourier coefficients.
        let g1 = PeriodicGrid::new(40.0, 256).unwrap();
        let g2 = PeriodicGrid::new(20.0, 256).unwrap();
        let u = RealField::from_fn(g1, |x| (-x * x / 2.0).exp()).unwrap();
        let v = RealField::from_fn(g2, |x| 2.0 * (-(2.0 * x).powi(2) / 2.0).exp()).unwrap();
        let (a6, a4) = gn_ratios(&u).unwrap();
        let (b6, b4) = gn_ratios(&v).unwrap();
        assert!((a6 - b6).abs() < 1e-8 * a6);
        assert!((a4 - b4).abs() < 1e-8 * a4);
    }

    #[test]
    fn budget_requires_recorded_order() {
        let grid = PeriodicGrid::new(64.0 * PI, 256).unwrap();
        let phi = RealField::from_fn(grid, |x| 0.5 * (-x * x / 8.0).exp()).unwrap();
        let eq = EquationSpec::mkdv_b(0.1, 0.5).unwrap();
        let traj = evolve(&phi, &eq, 0.2, &SolverConfig::new(0.02)).unwrap();
        assert!(dissipation_budget(&traj, 0.5).unwrap() > 0.0);
        assert!(matches!(dissipation_budget(&traj, 1.0), Err(Error::Diagnostic(_))));
        let inviscid = evolve(&phi, &EquationSpec::mkdv(), 0.2, &SolverConfig::new(0.02)).unwrap();
        assert_eq!(dissipation_budget(&inviscid, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn miura_needs_mkdv_and_three_snapshots() {
        let grid = PeriodicGrid::new(10.0, 64).unwrap();
        let z = RealField::zeros(grid);
        let short = evolve(&z, &EquationSpec::mkdv(), 0.1, &SolverConfig::new(0.1)).unwrap();
        assert!(matches!(miura_consistency(&short), Err(Error::Diagnostic(_))));
        let zero = evolve(&z, &EquationSpec::mkdv(), 0.3, &SolverConfig::new(0.1)).unwrap();
        assert_eq!(miura_consistency(&zero).unwrap(), 0.0);
        let kdv = evolve(&z, &EquationSpec::kdv(), 0.3, &SolverConfig::new(0.1)).unwrap();
        assert!(miura_consistency(&kdv).is_err());
    }
}
