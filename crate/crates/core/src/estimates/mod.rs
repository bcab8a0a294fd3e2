//! Discrete versions of the harmonic-analysis tools behind the well-posedness
//! theory: dyadic cutoffs, space-time norms, the resonance function, the
//! four-block form `J` and an `L⁶` Strichartz ratio.

mod blocks;
mod cutoffs;
mod resonance;
mod spacetime;
mod strichartz;

pub use blocks::{
    brute_force_j, check_j_bound, convolution_j, frequency_component, modulation_component, random_blocks,
    resonance_matched_j, sweep_j_bound, BlockFunction, BlockIndices, BoundCase, BoundReport, BoundSweep, Interval,
    BOUND_SPREAD_LIMIT, DEFAULT_BUDGET, DEFAULT_NODES,
};
pub use cutoffs::{chi, eta, eta0, in_dyadic_shell, in_modulation_shell, project_pk, smooth_step, time_window, top_shell};
pub use resonance::{critical_regularity, resonance, Resonance};
pub use spacetime::{
    check_linear_fs_bound, fs_norm, ns_norm, xk_block_norm, LinearBoundTable, SpaceTimeField, XkNorm,
    LINEAR_SPREAD_LIMIT, LINEAR_WINDOW,
};
pub use strichartz::{airy_l6_ratio, random_shell_data};
