use num_complex::Complex64;
use serde::Serialize;

use super::grid::PeriodicGrid;
use crate::error::{Error, Result};

/// Asymmetry above this (relative to the largest coefficient) means the
/// coefficients cannot come from a real field.
const GROSS_ASYMMETRY: f64 = 1e-6;

/// Real samples `u(x_n)` on a periodic grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealField {
    grid: PeriodicGrid,
    samples: Vec<f64>,
}

impl RealField {
    pub fn new(grid: PeriodicGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.points() {
            return Err(Error::data(format!(
                "expected {} samples, got {}",
                grid.points(),
                samples.len()
            )));
        }
        if let Some(n) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::data(format!("non-finite sample at index {n}")));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        let samples = vec![0.0; grid.points()];
        Self { grid, samples }
    }

    pub fn from_fn(grid: PeriodicGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = grid.xs().into_iter().map(f).collect();
        Self::new(grid, samples)
    }

    pub(crate) fn from_parts_unchecked(grid: PeriodicGrid, samples: Vec<f64>) -> Self {
        debug_assert_eq!(samples.len(), grid.points());
        Self { grid, samples }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `∫ u dx` by the periodic rectangle rule.
    pub fn integral(&self) -> f64 {
        self.samples.iter().sum::<f64>() * self.grid.dx()
    }

    /// `(∫ u² dx)^{1/2}` in physical space.
    pub fn l2_norm(&self) -> f64 {
        (self.samples.iter().map(|v| v * v).sum::<f64>() * self.grid.dx()).sqrt()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            samples: self.samples.iter().map(|v| a * v).collect(),
        }
    }

    pub fn difference(&self, other: &RealField) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::param("fields live on different grids"));
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { grid: self.grid.clone(), samples })
    }

    /// Largest `|u|` within `fraction·L` of the box edge. Small values certify
    /// that the periodic box is a faithful stand-in for the line.
    pub fn boundary_decay(&self, fraction: f64) -> f64 {
        let edge = 0.5 * self.grid.length() * (1.0 - 2.0 * fraction);
        self.grid
            .xs()
            .iter()
            .zip(&self.samples)
            .filter(|(x, _)| x.abs() >= edge)
            .fold(0.0_f64, |m, (_, v)| m.max(v.abs()))
    }
}

/// Fourier coefficients `û(ξ_m)` in FFT order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: PeriodicGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: PeriodicGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.points() {
            return Err(Error::data(format!(
                "expected {} coefficients, got {}",
                grid.points(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::data("non-finite Fourier coefficient"));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        let coeffs = vec![Complex64::new(0.0, 0.0); grid.points()];
        Self { grid, coeffs }
    }

    pub(crate) fn from_parts_unchecked(grid: PeriodicGrid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.points());
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of integer mode `m`, zero off the lattice.
    pub fn mode(&self, m: i64) -> Complex64 {
        self.grid
            .index_of_mode(m)
            .map(|i| self.coeffs[i])
            .unwrap_or_default()
    }

    /// `a·self + other`, coefficientwise.
    pub fn axpy(&self, a: Complex64, other: &SpectralField) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::param("fields live on different grids"));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| a * x + y)
            .collect();
        Ok(Self { grid: self.grid.clone(), coeffs })
    }

    /// Largest `|û(ξ) - conj(û(-ξ))|`, relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        let n = self.grid.points();
        let mut worst = self.coeffs[0].im.abs().max(self.coeffs[n / 2].im.abs());
        for i in 1..n / 2 {
            worst = worst.max((self.coeffs[i] - self.coeffs[n - i].conj()).norm());
        }
        worst / scale
    }
}

/// Samples → coefficients under the Δx-weighted convention, without validation.
pub(crate) fn spectral_from_samples(grid: &PeriodicGrid, samples: &[f64]) -> Vec<Complex64> {
    let dx = grid.dx();
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    grid.fft_forward(&mut buf);
    for (i, c) in buf.iter_mut().enumerate() {
        let sign = if grid.mode(i) % 2 == 0 { dx } else { -dx };
        *c *= sign;
    }
    buf
}

/// Coefficients → real samples, dropping the imaginary residue.
pub(crate) fn physical_from_coeffs(grid: &PeriodicGrid, coeffs: &[Complex64]) -> Vec<f64> {
    let scale = 1.0 / grid.length();
    let mut buf: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| if grid.mode(i) % 2 == 0 { *c * scale } else { -*c * scale })
        .collect();
    grid.fft_inverse(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

pub fn forward_transform(u: &RealField) -> SpectralField {
    let coeffs = spectral_from_samples(&u.grid, &u.samples);
    SpectralField { grid: u.grid.clone(), coeffs }
}

/// Symmetrises small Hermitian defects and inverts. Gross asymmetry is an error:
/// it means an upstream operation broke reality.
pub fn inverse_transform(s: &SpectralField) -> Result<RealField> {
    let defect = s.hermitian_defect();
    if defect > GROSS_ASYMMETRY {
        return Err(Error::data(format!(
            "coefficients are not Hermitian (relative defect {defect:.3e})"
        )));
    }
    let n = s.grid.points();
    let mut sym = s.coeffs.clone();
    sym[0].im = 0.0;
    sym[n / 2].im = 0.0;
    for i in 1..n / 2 {
        let avg = 0.5 * (s.coeffs[i] + s.coeffs[n - i].conj());
        sym[i] = avg;
        sym[n - i] = avg.conj();
    }
    let samples = physical_from_coeffs(&s.grid, &sym);
    RealField::new(s.grid.clone(), samples)
}

/// Moves coefficients to another resolution of the same box (zero padding or
/// truncation). The unpaired Nyquist mode of the target is left at zero.
pub fn resample(s: &SpectralField, target: &PeriodicGrid) -> Result<SpectralField> {
    if (s.grid.length() - target.length()).abs() > 1e-12 * s.grid.length() {
        return Err(Error::param("resampling requires the same box length"));
    }
    let keep = (s.grid.points().min(target.points()) / 2) as i64;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); target.points()];
    for m in (-keep + 1)..keep {
        let src = s.grid.index_of_mode(m).expect("mode within source lattice");
        let dst = target.index_of_mode(m).expect("mode within target lattice");
        coeffs[dst] = s.coeffs[src];
    }
    Ok(SpectralField { grid: target.clone(), coeffs })
}
