//! Position solving and the per-pose localization pipeline.

mod pipeline;
mod run;
mod solver;

pub use pipeline::{multishot_step, Localizer, MultishotConfig, WeightSource};
pub use run::{run_trajectory, run_trajectory_with, TrackPoint, TrajectoryRun};
pub use solver::{
    linear_init, solve_fix, solve_fix_with, weighted_cost, FixMethod, FixResult, RangeObservation, SolverConfig,
};
