use super::field::SpectralField;
use super::multiplier::fractional_power;
use crate::error::{Error, Result};

/// `((1/L) Σ w(ξ_m) |û_m|²)^{1/2}`; with `w ≡ 1` this is the physical L² norm.
pub(crate) fn weighted_l2(s: &SpectralField, weight: impl Fn(f64) -> f64) -> f64 {
    let grid = s.grid();
    let sum: f64 = s
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| weight(grid.wavenumber(i)) * c.norm_sqr())
        .sum();
    (sum / grid.length()).sqrt()
}

/// `H^σ` norm with weight `⟨ξ⟩^{2σ} = (1+ξ²)^σ`, for `σ ∈ [-2, 4]`.
pub fn sobolev_norm(s: &SpectralField, sigma: f64) -> Result<f64> {
    if !(-2.0..=4.0).contains(&sigma) {
        return Err(Error::param(format!("Sobolev index must lie in [-2, 4], got {sigma}")));
    }
    Ok(weighted_l2(s, |xi| (1.0 + xi * xi).powf(sigma)))
}

/// `‖Λ^σ u‖₂` with weight `|ξ|^{2σ}`, for `σ ∈ [0, 4]`. The zero mode never contributes.
pub fn homogeneous_seminorm(s: &SpectralField, sigma: f64) -> Result<f64> {
    if !(0.0..=4.0).contains(&sigma) {
        return Err(Error::param(format!("homogeneous index must lie in [0, 4], got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(weighted_l2(s, |xi| if xi == 0.0 { 0.0 } else { 1.0 }));
    }
    Ok(weighted_l2(s, |xi| fractional_power(xi, 2.0 * sigma)))
}
