//! Pseudospectral laboratory for the MKdV-Burgers family
//!
//! ```text
//! u_t + u_xxx + ε|∂_x|^{2α} u = N(u)
//! ```
//!
//! on a periodic box standing in for the real line, together with the
//! diagnostics used to check its quantitative structure: conserved and
//! dissipated functionals, the Miura map to KdV, scaling covariance,
//! dyadic space-time norms, the symmetric quadrilinear form `J` and the
//! inviscid limit as ε → 0.
//!
//! Modules:
//! - [`spectral`]: grids, transforms, Fourier multipliers, Sobolev norms, linear propagators.
//! - [`evolution`]: the nonlinear integrator, trajectories, scaling and inviscid-limit experiments.
//! - [`functionals`]: conservation laws, dissipation budgets, Gagliardo–Nirenberg ratios, Miura map.
//! - [`estimates`]: Littlewood–Paley cutoffs, `X_k`/`F^s`/`N^s` norms, resonance, `J` oracle, Strichartz ratio.

pub mod error;
pub mod estimates;
pub mod evolution;
pub mod functionals;
pub mod profiles;
pub mod spectral;

pub use error::{Error, Result};
