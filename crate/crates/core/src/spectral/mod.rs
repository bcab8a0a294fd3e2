//! Periodic grids, Fourier transforms, multipliers and the linear propagators.
//!
//! Transform convention: `û(ξ) = ∫ e^{-ixξ} u(x) dx`, discretised as a Δx-weighted
//! sum over the points `x_n = -L/2 + nΔx`. The inverse carries the matching `1/L`,
//! so `Σ|u_n|²Δx = (1/L) Σ|û_m|²`. Coefficients are stored in FFT order
//! (`m = 0, 1, …, N/2-1, -N/2, …, -1`).

mod field;
mod grid;
mod multiplier;
mod norms;

pub use field::{forward_transform, inverse_transform, resample, RealField, SpectralField};
pub use grid::PeriodicGrid;
pub use multiplier::{
    airy_evolve, apply_multiplier, dissipative_evolve, fractional_power, MultiplierSymbol,
};
pub use norms::{homogeneous_seminorm, sobolev_norm};

pub(crate) use field::{physical_from_coeffs, spectral_from_samples};
pub(crate) use norms::weighted_l2;
