//! Baseline searches: re-starting descent directions and outer particle
//! swarm optimisation.
//!
//! Both run full neighbourhood searches at every candidate (no curtailment)
//! and keep going until the evaluation budget is spent.

mod descent;
mod pso;

pub use descent::{
    dd_restart_search, descent_direction, min_norm_point, step_size, DescentParams,
    DescentParamsError, Direction, DirectionError, ResolvedDescent,
};
pub use pso::{pso_search, PsoParams, PsoParamsError};
