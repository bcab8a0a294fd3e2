//! Nonlinear time integration of KdV, KdV-B, MKdV and MKdV-B, plus the
//! scaling and inviscid-limit experiments built on it.

mod equation;
mod scaling;
mod stepper;
mod sweep;
mod trajectory;

pub use equation::{EquationSpec, Family};
pub use scaling::{scaled_dissipation, scaling_check, scaling_check_on, ScalingReport};
pub use stepper::{default_dt, nonlinear_rhs, step, SolverConfig};
pub use sweep::{fit_loglog_slope, inviscid_limit_sweep, inviscid_limit_sweep_partial, SweepReport, SweepRow};
pub use trajectory::{calibrate_dt, evolve, DissipationSeries, Trajectory, BLOW_UP_FACTOR};

pub(crate) use trajectory::trapezoid;
