//! `L⁶` Strichartz ratio for the free Airy flow on dyadic shells.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cutoffs::project_pk;
use crate::error::{Error, Result};
use crate::spectral::{physical_from_coeffs, sobolev_norm, PeriodicGrid, SpectralField};

/// Random coefficients on the modes with `|ξ| ∈ [2^{k-1}, 2^{k+1}]`, Hermitian
/// so the field is real.
pub fn random_shell_data(grid: &PeriodicGrid, k: u32, seed: u64) -> Result<SpectralField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (2f64.powi(k as i32 - 1), 2f64.powi(k as i32 + 1));
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.points()];
    for m in 1..(grid.points() / 2) as i64 {
        let xi = grid.fundamental() * m as f64;
        if xi < lo || xi > hi {
            continue;
        }
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        coeffs[grid.index_of_mode(m).expect("below Nyquist")] = c;
        coeffs[grid.index_of_mode(-m).expect("below Nyquist")] = c.conj();
    }
    SpectralField::new(grid.clone(), coeffs)
}

/// `‖W₀(t)P_k f‖_{L⁶([0,T_w] × box)} · 2^{k/6} / ‖f‖₂`, or `None` for `f = 0`.
///
/// Time is sampled by jittered stratification (`samples` strata, jitter drawn
/// from `seed`); the sixth power is integrated exactly on a grid padded so that
/// `|u|⁶` is not aliased.
pub fn airy_l6_ratio(k: u32, f: &SpectralField, window: f64, samples: usize, seed: u64) -> Result<Option<f64>> {
    let grid = f.grid();
    if 2f64.powi(k as i32 + 1) > 0.5 * grid.fundamental() * (grid.points() / 2) as f64 {
        return Err(Error::param(format!("shell k = {k} reaches beyond half the Nyquist wavenumber")));
    }
    if !(window.is_finite() && window > 0.0) || samples == 0 {
        return Err(Error::param("need a positive window and at least one time sample"));
    }
    let norm = sobolev_norm(f, 0.0)?;
    if norm == 0.0 {
        return Ok(None);
    }
    let p = project_pk(f, k);
    let top = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(i, _)| grid.mode(i).unsigned_abs() as usize)
        .max()
        .unwrap_or(0);
    let fine = grid.with_points((6 * top + 2).next_power_of_two().max(grid.points()))?;
    let mut padded = vec![Complex64::new(0.0, 0.0); fine.points()];
    let mut xis = vec![0.0; fine.points()];
    for (i, c) in p.coeffs().iter().enumerate() {
        if let Some(j) = fine.index_of_mode(grid.mode(i)) {
            padded[j] = *c;
            xis[j] = grid.wavenumber(i);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dt = window / samples as f64;
    let mut total = 0.0;
    let mut buf = vec![Complex64::new(0.0, 0.0); fine.points()];
    for l in 0..samples {
        let t = (l as f64 + rng.gen::<f64>()) * dt;
        for ((b, c), xi) in buf.iter_mut().zip(&padded).zip(&xis) {
            *b = c * Complex64::from_polar(1.0, xi.powi(3) * t);
        }
        let u = physical_from_coeffs(&fine, &buf);
        total += u.iter().map(|v| v.powi(6)).sum::<f64>() * fine.dx() * dt;
    }
    Ok(Some(total.powf(1.0 / 6.0) * 2f64.powf(k as f64 / 6.0) / norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_and_homogeneity() {
        let grid = PeriodicGrid::new(16.0 * PI, 1024).unwrap();
        assert_eq!(airy_l6_ratio(3, &SpectralField::zeros(grid.clone()), 1.0, 8, 0).unwrap(), None);
        let f = random_shell_data(&grid, 3, 1).unwrap();
        let g = SpectralField::new(grid, f.coeffs().iter().map(|c| c * 2.0).collect()).unwrap();
        let a = airy_l6_ratio(3, &f, 1.0, 16, 4).unwrap().unwrap();
        let b = airy_l6_ratio(3, &g, 1.0, 16, 4).unwrap().unwrap();
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn static_mode_matches_closed_form() {
        // cos(x) is fixed by W₀ up to a phase; ∫cos⁶ = 5π/8 per period.
        let grid = PeriodicGrid::new(2.0 * PI, 64).unwrap();
        let mut c = vec![Complex64::new(0.0, 0.0); 64];
        c[1] = Complex64::new(PI, 0.0);
        c[63] = Complex64::new(PI, 0.0);
        let f = SpectralField::new(grid, c).unwrap();
        // k = 0 keeps |ξ| = 1 untouched; over [0, 2π] the sixth power averages to 5/16.
        let r = airy_l6_ratio(0, &f, 2.0 * PI, 256, 1).unwrap().unwrap();
        let norm = PI.sqrt();
        let l6 = (2.0 * PI * 2.0 * PI * 5.0 / 16.0f64).powf(1.0 / 6.0);
        assert!((r - l6 / norm).abs() < 0.02 * r, "{r} vs {}", l6 / norm);
    }

    #[test]
    fn shell_limit() {
        let grid = PeriodicGrid::new(16.0 * PI, 256).unwrap();
        let f = random_shell_data(&grid, 2, 0).unwrap();
        assert!(airy_l6_ratio(4, &f, 1.0, 4, 0).is_err());
        assert!(airy_l6_ratio(2, &f, 1.0, 4, 0).unwrap().is_some());
    }
}
