//! Deterministic scenario simulator.

pub mod builtin;
mod los;
mod measure;
mod scenario;
mod sensors;
mod trajectory;

pub use los::{is_los, segments_intersect};
pub use measure::{rss_proxy, synthesize_measurements, synthesize_observations, Observation};
pub use scenario::{IndoorInterval, MagDisturbance, NoiseModel, Scenario, Segment, Waypoint};
pub use sensors::{indoor_fraction, synthesize_sensor_stream, SensorSample};
pub use trajectory::generate_trajectory;
