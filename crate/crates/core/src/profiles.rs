//! Named initial data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{physical_from_coeffs, PeriodicGrid, RealField};
use num_complex::Complex64;

/// An initial profile, sampled onto a grid with [`Profile::sample`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Profile {
    /// `a·exp(-x²/(2w²))`
    Gaussian { amplitude: f64, width: f64 },
    /// `a·sech(x/w)`
    Sech { amplitude: f64, width: f64 },
    /// `a·cos(2πmx/L)`
    Cosine { amplitude: f64, mode: u32 },
    /// Random coefficients on modes `1 ≤ |m| ≤ band`, scaled to unit `L²` norm
    /// and then multiplied by `amplitude`.
    RandomBandlimited { amplitude: f64, seed: u64, band: usize },
}

impl Profile {
    pub fn gaussian(amplitude: f64, width: f64) -> Self {
        Profile::Gaussian { amplitude, width }
    }

    pub fn sech(amplitude: f64, width: f64) -> Self {
        Profile::Sech { amplitude, width }
    }

    pub fn cosine(amplitude: f64, mode: u32) -> Self {
        Profile::Cosine { amplitude, mode }
    }

    pub fn random_bandlimited(amplitude: f64, seed: u64, band: usize) -> Self {
        Profile::RandomBandlimited { amplitude, seed, band }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Profile::Gaussian { .. } => "gaussian",
            Profile::Sech { .. } => "sech",
            Profile::Cosine { .. } => "cosine",
            Profile::RandomBandlimited { .. } => "random-bandlimited",
        }
    }

    pub fn sample(&self, grid: &PeriodicGrid) -> Result<RealField> {
        match *self {
            Profile::Gaussian { amplitude, width } => {
                check_width(width)?;
                RealField::from_fn(grid.clone(), |x| amplitude * (-x * x / (2.0 * width * width)).exp())
            }
            Profile::Sech { amplitude, width } => {
                check_width(width)?;
                RealField::from_fn(grid.clone(), |x| amplitude / (x / width).cosh())
            }
            Profile::Cosine { amplitude, mode } => {
                let k = grid.fundamental() * mode as f64;
                if mode as usize >= grid.points() / 2 {
                    return Err(Error::param(format!("cosine mode {mode} is not below Nyquist")));
                }
                RealField::from_fn(grid.clone(), |x| amplitude * (k * x).cos())
            }
            Profile::RandomBandlimited { amplitude, seed, band } => {
                if band == 0 || band >= grid.points() / 2 {
                    return Err(Error::param(format!("band {band} must lie in [1, N/2)")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.points()];
                for m in 1..=band as i64 {
                    let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    let i = grid.index_of_mode(m).expect("below Nyquist");
                    let j = grid.index_of_mode(-m).expect("below Nyquist");
                    coeffs[i] = c;
                    coeffs[j] = c.conj();
                }
                let samples = physical_from_coeffs(grid, &coeffs);
                let field = RealField::new(grid.clone(), samples)?;
                let norm = field.l2_norm();
                Ok(field.scaled(amplitude / norm))
            }
        }
    }
}

fn check_width(width: f64) -> Result<()> {
    if width.is_finite() && width > 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("profile width must be positive, got {width}")))
    }
}
