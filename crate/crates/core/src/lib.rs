//! Indoor localization from short-range ranging anchors: a floor-plan
//! simulator, indoor/outdoor detection, single-anchor and multi-anchor
//! positioning, anchor selection and an evaluation harness.

pub mod detection;
pub mod error;
pub mod eval;
pub mod model;
pub mod multilateration;
pub mod oneshot;
mod rng;
pub mod selector;
pub mod sim;

pub use detection::{detector_step, Detector, DetectorConfig, DetectorEvent, DetectorMode, DetectorState};
pub use error::{Error, Result};
pub use eval::{
    cdf, compute_errors, percentile, summarize, sweep, ErrorSeries, Summary, SweepAxis, SweepRow, SweepValue,
};
pub use model::{angle_diff, euclidean_distance, wrap_angle, AnchorTag, Pose, TagMeasurement, Vec2};
pub use multilateration::{
    linear_init, multishot_step, run_trajectory, solve_fix, FixMethod, FixResult, Localizer, MultishotConfig,
    RangeObservation, TrackPoint, TrajectoryRun,
};
pub use oneshot::{fuse_heading, one_shot_fix, HeadingEstimate, HeadingSource, HeadingTracker};
pub use selector::{select, RangeHistory, SelectionKind, SelectionPolicy};
pub use sim::{NoiseModel, Scenario};
