//! Space-time Fourier fields and the dyadic `X_k`, `F^s`, `N^s` norms.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use super::cutoffs::{eta, time_window};
use crate::error::{Error, Result};
use crate::spectral::{MultiplierSymbol, PeriodicGrid, SpectralField};

/// `F(ξ_m, τ_l) = ∫∫ e^{-i(xξ + tτ)} u dx dt` over the box and the time window
/// `[-T_w/2, T_w/2)`, sampled at `M` points. Stored time-major: `coeffs[l·N + m]`.
#[derive(Clone, Debug)]
pub struct SpaceTimeField {
    grid: PeriodicGrid,
    window: f64,
    times: usize,
    coeffs: Vec<Complex64>,
}

impl SpaceTimeField {
    /// From spatial coefficients `û(ξ, t_l)` at `t_l = -T_w/2 + l·T_w/M`,
    /// given as one `SpectralField` per time.
    pub fn from_slices(window: f64, slices: &[SpectralField]) -> Result<Self> {
        if !(window.is_finite() && window > 0.0) {
            return Err(Error::param(format!("time window must be positive, got {window}")));
        }
        let m = slices.len();
        if m < 2 || !m.is_multiple_of(2) {
            return Err(Error::param(format!("need an even number (≥ 2) of time samples, got {m}")));
        }
        let grid = slices[0].grid().clone();
        if slices.iter().any(|s| s.grid() != &grid) {
            return Err(Error::param("time slices live on different grids"));
        }
        let n = grid.points();
        let dt = window / m as f64;
        let fft = FftPlanner::new().plan_fft_forward(m);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n * m];
        let mut column = vec![Complex64::new(0.0, 0.0); m];
        for i in 0..n {
            for (l, s) in slices.iter().enumerate() {
                column[l] = s.coeffs()[i];
            }
            fft.process(&mut column);
            // Window starts at -T_w/2, so frequency l picks up (-1)^l.
            for (l, c) in column.iter().enumerate() {
                let sign = if l % 2 == 0 { dt } else { -dt };
                coeffs[l * n + i] = c * sign;
            }
        }
        Ok(Self { grid, window, times: m, coeffs })
    }

    /// Sample `t ↦ û(·, t)` at the `M` window times.
    pub fn from_fn(
        grid: &PeriodicGrid,
        window: f64,
        times: usize,
        slice: impl Fn(f64) -> Result<SpectralField>,
    ) -> Result<Self> {
        let dt = window / times as f64;
        let slices = (0..times)
            .map(|l| slice(-0.5 * window + l as f64 * dt))
            .collect::<Result<Vec<_>>>()?;
        if slices.iter().any(|s| s.grid() != grid) {
            return Err(Error::param("slice grid differs from the requested grid"));
        }
        Self::from_slices(window, &slices)
    }

    pub fn zeros(grid: &PeriodicGrid, window: f64, times: usize) -> Self {
        Self { grid: grid.clone(), window, times, coeffs: vec![Complex64::new(0.0, 0.0); grid.points() * times] }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn time_samples(&self) -> usize {
        self.times
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Signed temporal frequency of row `l`.
    pub fn tau(&self, l: usize) -> f64 {
        let m = self.times as i64;
        let l = l as i64;
        let signed = if l < m / 2 { l } else { l - m };
        2.0 * std::f64::consts::PI * signed as f64 / self.window
    }

    pub fn tau_nyquist(&self) -> f64 {
        std::f64::consts::PI * self.times as f64 / self.window
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * a).collect(), ..self.clone() }
    }

    /// `(1/(L·T_w)) Σ w(ξ,τ)|F|²`, the discrete `∫∫ w|F|² dξ dτ / (2π)²`.
    fn weighted_sq(&self, weight: impl Fn(f64, f64) -> f64) -> f64 {
        let n = self.grid.points();
        let mut sum = 0.0;
        for l in 0..self.times {
            let tau = self.tau(l);
            for i in 0..n {
                let c = self.coeffs[l * n + i];
                if c.re == 0.0 && c.im == 0.0 {
                    continue;
                }
                sum += weight(self.grid.wavenumber(i), tau) * c.norm_sqr();
            }
        }
        sum / (self.grid.length() * self.window)
    }

    /// Space-time `L²` norm; equals the physical `L²` norm on box × window.
    pub fn l2_norm(&self) -> f64 {
        self.weighted_sq(|_, _| 1.0).sqrt()
    }

    fn max_modulation(&self) -> f64 {
        let xmax = self.grid.fundamental() * (self.grid.points() / 2) as f64;
        self.tau_nyquist() + xmax.powi(3)
    }
}

/// `Σ_j 2^{j/2} ‖η_j(τ-ξ³)·F‖₂` with the per-`j` terms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XkNorm {
    pub value: f64,
    /// `‖η_j(τ-ξ³)F‖₂` for `j = 0..=truncation`.
    pub profile: Vec<f64>,
    /// Last `j` kept; `η_0 + … + η_J ≡ 1` on every sampled `(ξ, τ)`.
    pub truncation: u32,
}

impl XkNorm {
    /// Index of the largest weighted term `2^{j/2}‖…‖`.
    pub fn peak(&self) -> usize {
        self.profile
            .iter()
            .enumerate()
            .map(|(j, v)| (j, 2f64.powf(j as f64 / 2.0) * v))
            .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
            .0
    }
}

fn modulation_truncation(max: f64) -> u32 {
    let mut j = 0;
    while 1.25 * 2f64.powi(j as i32) < max {
        j += 1;
    }
    j
}

/// Shells `j` with `η_j(x) ≠ 0` (at most two) and the cutoff values.
fn shells(x: f64) -> impl Iterator<Item = (u32, f64)> {
    let centre = x.abs().max(1.0).log2().round() as i64;
    (centre - 1..=centre + 1)
        .filter(|&j| j >= 0)
        .map(move |j| (j as u32, eta(j as u32, x)))
        .filter(|&(_, v)| v != 0.0)
}

/// `acc[k][j] = ‖η_k(ξ)η_j(τ-ξ³)F‖²` weighted by `w`, in one pass. With
/// `by_k = false` the `ξ` cutoff is skipped and everything lands in row 0.
fn accumulate(f: &SpaceTimeField, by_k: bool, weight: impl Fn(f64, f64) -> f64) -> (Vec<Vec<f64>>, u32) {
    let jmax = modulation_truncation(f.max_modulation());
    let rows = if by_k { top_k(f) as usize + 1 } else { 1 };
    let mut acc = vec![vec![0.0; jmax as usize + 1]; rows];
    let n = f.grid.points();
    let xis: Vec<f64> = (0..n).map(|i| f.grid.wavenumber(i)).collect();
    let kshells: Vec<Vec<(u32, f64)>> = xis
        .iter()
        .map(|&xi| if by_k { shells(xi).collect() } else { vec![(0, 1.0)] })
        .collect();
    for l in 0..f.times {
        let tau = f.tau(l);
        for i in 0..n {
            let c = f.coeffs[l * n + i];
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let xi = xis[i];
            let base = weight(xi, tau) * c.norm_sqr();
            for (j, ej) in shells(tau - xi.powi(3)) {
                for &(k, ek) in &kshells[i] {
                    acc[k as usize][j as usize] += base * (ek * ej).powi(2);
                }
            }
        }
    }
    let scale = 1.0 / (f.grid.length() * f.window);
    for row in acc.iter_mut() {
        for v in row.iter_mut() {
            *v *= scale;
        }
    }
    (acc, jmax)
}

fn xk_from_row(row: &[f64], truncation: u32) -> XkNorm {
    let profile: Vec<f64> = row.iter().map(|v| v.sqrt()).collect();
    let value = profile.iter().enumerate().map(|(j, v)| 2f64.powf(j as f64 / 2.0) * v).sum();
    XkNorm { value, profile, truncation }
}

fn check_shell(f: &SpaceTimeField, k: u32) -> Result<()> {
    let xmax = f.grid.fundamental() * (f.grid.points() / 2) as f64;
    if 2f64.powi(k as i32 - 1) > xmax {
        return Err(Error::param(format!("shell k = {k} lies beyond the spatial Nyquist wavenumber {xmax}")));
    }
    Ok(())
}

/// `X_k` norm of `F` as given (apply the `ξ`-cutoff beforehand).
pub fn xk_block_norm(f: &SpaceTimeField, k: u32) -> Result<XkNorm> {
    check_shell(f, k)?;
    let (acc, jmax) = accumulate(f, false, |_, _| 1.0);
    Ok(xk_from_row(&acc[0], jmax))
}

fn top_k(f: &SpaceTimeField) -> u32 {
    let xmax = f.grid.fundamental() * (f.grid.points() / 2) as f64;
    let mut k = 0;
    while 1.25 * 2f64.powi(k as i32) < xmax {
        k += 1;
    }
    k
}

fn dyadic_sum(f: &SpaceTimeField, s: f64, weight: impl Fn(f64, f64) -> f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&s) {
        return Err(Error::param(format!("s must lie in [0, 2], got {s}")));
    }
    let (acc, jmax) = accumulate(f, true, weight);
    let total: f64 = acc
        .iter()
        .enumerate()
        .map(|(k, row)| 2f64.powf(2.0 * s * k as f64) * xk_from_row(row, jmax).value.powi(2))
        .sum();
    Ok(total.sqrt())
}

/// `(Σ_k 2^{2sk} ‖η_k(ξ)F‖²_{X_k})^{1/2}`.
pub fn fs_norm(f: &SpaceTimeField, s: f64) -> Result<f64> {
    dyadic_sum(f, s, |_, _| 1.0)
}

/// As [`fs_norm`] with `F` replaced by `(i + τ - ξ³)^{-1} F`.
pub fn ns_norm(f: &SpaceTimeField, s: f64) -> Result<f64> {
    dyadic_sum(f, s, |xi, tau| 1.0 / (1.0 + (tau - xi.powi(3)).powi(2)))
}

/// One row per ε of `‖ψ(t)W_ε^α(t)φ‖_{F^s} / ‖φ‖_{H^s}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearBoundTable {
    pub alpha: f64,
    pub s: f64,
    pub window: f64,
    pub time_samples: usize,
    pub epsilons: Vec<f64>,
    /// `None` when `φ = 0`.
    pub ratios: Vec<Option<f64>>,
    pub spread: Option<f64>,
    /// Set when the spread across ε exceeds [`LINEAR_SPREAD_LIMIT`].
    pub flagged: bool,
}

pub const LINEAR_SPREAD_LIMIT: f64 = 10.0;
/// Time window for the linear bound; `ψ` vanishes on its outer half.
pub const LINEAR_WINDOW: f64 = 8.0;
const MAX_TIME_SAMPLES: usize = 1 << 14;

/// Effective spectral radius of `φ`: largest `|ξ|` carrying more than `1e-14` of the peak.
fn band_edge(phi: &SpectralField) -> f64 {
    let max = phi.coeffs().iter().fold(0.0_f64, |m, c| m.max(c.norm()));
    let grid = phi.grid();
    phi.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 1e-14 * max)
        .fold(0.0_f64, |m, (i, _)| m.max(grid.wavenumber(i).abs()))
}

pub fn check_linear_fs_bound(phi: &SpectralField, epsilons: &[f64], alpha: f64, s: f64) -> Result<LinearBoundTable> {
    if !(0.0..=2.0).contains(&s) {
        return Err(Error::param(format!("s must lie in [0, 2], got {s}")));
    }
    for &e in epsilons {
        MultiplierSymbol::dissipative(0.0, e, alpha)?;
    }
    let grid = phi.grid();
    let edge = band_edge(phi);
    if edge > 0.5 * grid.max_wavenumber() {
        return Err(Error::param(format!(
            "φ reaches |ξ| = {edge:.3}, beyond half the Nyquist wavenumber {:.3}",
            grid.max_wavenumber()
        )));
    }
    // ψ is smooth with O(1) transitions; 64 covers its spectrum to round-off.
    let needed = edge.powi(3) + 64.0;
    let mut times = 64;
    while std::f64::consts::PI * times as f64 / LINEAR_WINDOW < needed {
        times *= 2;
        if times > MAX_TIME_SAMPLES {
            return Err(Error::param(format!(
                "resolving τ up to {needed:.1} needs more than {MAX_TIME_SAMPLES} time samples"
            )));
        }
    }
    let norm = crate::spectral::sobolev_norm(phi, s)?;
    let mut ratios = Vec::with_capacity(epsilons.len());
    for &e in epsilons {
        if norm == 0.0 {
            ratios.push(None);
            continue;
        }
        let field = SpaceTimeField::from_fn(grid, LINEAR_WINDOW, times, |t| {
            let w = time_window(t);
            let sym = MultiplierSymbol::dissipative(t, e, alpha)?;
            let coeffs = phi
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| if w == 0.0 { Complex64::new(0.0, 0.0) } else { c * sym.eval(grid.wavenumber(i)) * w })
                .collect();
            Ok(SpectralField::from_parts_unchecked(grid.clone(), coeffs))
        })?;
        ratios.push(Some(fs_norm(&field, s)? / norm));
    }
    let present: Vec<f64> = ratios.iter().flatten().copied().collect();
    let spread = if present.is_empty() {
        None
    } else {
        let max = present.iter().cloned().fold(f64::MIN, f64::max);
        let min = present.iter().cloned().fold(f64::MAX, f64::min);
        Some(max / min)
    };
    Ok(LinearBoundTable {
        alpha,
        s,
        window: LINEAR_WINDOW,
        time_samples: times,
        epsilons: epsilons.to_vec(),
        ratios,
        spread,
        flagged: spread.is_some_and(|r| r > LINEAR_SPREAD_LIMIT),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{forward_transform, RealField};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(seed: u64, grid: &PeriodicGrid, window: f64, times: usize, band: f64) -> SpaceTimeField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let slices: Vec<SpectralField> = (0..times)
            .map(|_| {
                let samples: Vec<f64> = (0..grid.points()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let s = forward_transform(&RealField::new(grid.clone(), samples).unwrap());
                let coeffs = s
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(i, c)| if grid.wavenumber(i).abs() <= band { *c } else { Complex64::new(0.0, 0.0) })
                    .collect();
                SpectralField::new(grid.clone(), coeffs).unwrap()
            })
            .collect();
        SpaceTimeField::from_slices(window, &slices).unwrap()
    }

    #[test]
    fn parseval_in_space_time() {
        let grid = PeriodicGrid::new(8.0, 32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let times = 16;
        let window = 3.0;
        let samples: Vec<Vec<f64>> =
            (0..times).map(|_| (0..32).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let physical: f64 = samples.iter().flatten().map(|v| v * v).sum::<f64>() * grid.dx() * window / times as f64;
        let slices: Vec<SpectralField> = samples
            .into_iter()
            .map(|s| forward_transform(&RealField::new(grid.clone(), s).unwrap()))
            .collect();
        let f = SpaceTimeField::from_slices(window, &slices).unwrap();
        assert!((f.l2_norm().powi(2) - physical).abs() < 1e-10 * physical);
    }

    #[test]
    fn time_phase_convention() {
        // u = e^{iωt}·(mode 1): all mass at τ = ω when ω is on the τ lattice.
        let grid = PeriodicGrid::new(2.0 * PI, 8).unwrap();
        let window = 2.0 * PI;
        let omega = 3.0;
        let f = SpaceTimeField::from_fn(&grid, window, 16, |t| {
            let mut c = vec![Complex64::new(0.0, 0.0); 8];
            c[1] = Complex64::from_polar(1.0, omega * t);
            Ok(SpectralField::from_parts_unchecked(grid.clone(), c))
        })
        .unwrap();
        let l = 3;
        assert_eq!(f.tau(l), omega);
        assert!((f.coeffs()[l * 8 + 1] - Complex64::new(window, 0.0)).norm() < 1e-12);
        let other: f64 = f.coeffs().iter().map(|c| c.norm()).sum::<f64>() - f.coeffs()[l * 8 + 1].norm();
        assert!(other < 1e-12);
    }

    #[test]
    fn zero_and_homogeneity() {
        let grid = PeriodicGrid::new(16.0, 64).unwrap();
        let z = SpaceTimeField::zeros(&grid, 4.0, 32);
        assert_eq!(xk_block_norm(&z, 2).unwrap().value, 0.0);
        assert_eq!(fs_norm(&z, 1.0).unwrap(), 0.0);
        assert_eq!(ns_norm(&z, 1.0).unwrap(), 0.0);
        let f = random_field(1, &grid, 4.0, 32, 6.0);
        let a = xk_block_norm(&f, 2).unwrap().value;
        let b = xk_block_norm(&f.scaled(2.0), 2).unwrap().value;
        assert!((b - 2.0 * a).abs() < 1e-12 * a);
        assert!(xk_block_norm(&f, 10).is_err());
        assert!(fs_norm(&f, 2.5).is_err());
    }

    #[test]
    fn ns_never_exceeds_fs() {
        let grid = PeriodicGrid::new(16.0, 64).unwrap();
        for seed in 0..10 {
            let f = random_field(seed, &grid, 4.0, 32, 10.0);
            for s in [0.0, 0.5, 1.0, 2.0] {
                assert!(ns_norm(&f, s).unwrap() <= fs_norm(&f, s).unwrap());
            }
        }
    }

    #[test]
    fn single_block_reduces_to_xk() {
        // Keep only modes where η_3 ≡ 1 (|ξ| ∈ [6.4, 10]).
        let grid = PeriodicGrid::new(4.0 * PI, 128).unwrap();
        let full = random_field(9, &grid, 4.0, 32, 40.0);
        let n = grid.points();
        let mut coeffs = full.coeffs().to_vec();
        for (idx, c) in coeffs.iter_mut().enumerate() {
            let xi = grid.wavenumber(idx % n).abs();
            if !(6.5..=10.0).contains(&xi) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        let f = SpaceTimeField { coeffs, ..full };
        let x = xk_block_norm(&f, 3).unwrap().value;
        for s in [0.0, 0.5, 1.5] {
            let fs = fs_norm(&f, s).unwrap();
            assert!((fs - 2f64.powf(3.0 * s) * x).abs() < 1e-10 * fs);
        }
    }

    #[test]
    fn windowed_free_wave_sits_near_characteristic() {
        let grid = PeriodicGrid::new(64.0 * PI, 512).unwrap();
        let phi = forward_transform(&RealField::from_fn(grid.clone(), |x| (-x * x / 8.0).exp()).unwrap());
        let times = 1024;
        let f = SpaceTimeField::from_fn(&grid, 8.0, times, |t| {
            let sym = MultiplierSymbol::airy(t);
            let w = time_window(t);
            let c = phi.coeffs().iter().enumerate().map(|(i, c)| c * sym.eval(grid.wavenumber(i)) * w).collect();
            Ok(SpectralField::from_parts_unchecked(grid.clone(), c))
        })
        .unwrap();
        let x = xk_block_norm(&f, 1).unwrap();
        assert!(x.peak() <= 4, "{:?}", x.profile);
        let tail: f64 = x.profile[6..].iter().sum();
        assert!(tail < 1e-4 * x.profile.iter().sum::<f64>(), "{:?}", x.profile);
    }

    #[test]
    fn linear_bound_table() {
        let grid = PeriodicGrid::new(64.0 * PI, 1024).unwrap();
        let phi = forward_transform(&RealField::from_fn(grid.clone(), |x| 0.5 * (-x * x / 8.0).exp()).unwrap());
        let t = check_linear_fs_bound(&phi, &[0.0, 1e-2, 1.0], 1.0, 1.0).unwrap();
        assert!(t.ratios.iter().all(|r| r.unwrap().is_finite() && r.unwrap() > 0.0));
        assert!(!t.flagged, "{:?}", t);
        let doubled = SpectralField::new(grid.clone(), phi.coeffs().iter().map(|c| c * 2.0).collect()).unwrap();
        let t2 = check_linear_fs_bound(&doubled, &[0.0, 1e-2, 1.0], 1.0, 1.0).unwrap();
        for (a, b) in t.ratios.iter().zip(&t2.ratios) {
            assert!((a.unwrap() - b.unwrap()).abs() < 1e-12 * a.unwrap());
        }
        let zero = check_linear_fs_bound(&SpectralField::zeros(grid.clone()), &[0.0, 1.0], 1.0, 1.0).unwrap();
        assert!(zero.ratios.iter().all(Option::is_none));
        assert_eq!(zero.spread, None);
        // Broad-band data needs too many time samples.
        let rough = forward_transform(&RealField::from_fn(grid, |x| (-x * x * 8.0).exp()).unwrap());
        assert!(matches!(check_linear_fs_bound(&rough, &[0.0], 1.0, 1.0), Err(Error::Parameter(_))));
    }
}
