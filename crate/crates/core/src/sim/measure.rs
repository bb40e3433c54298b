use rand_distr::{Distribution, StandardNormal};

use crate::model::{euclidean_distance, wrap_angle, Pose, TagMeasurement};
use crate::rng::{stream, DOMAIN_MEASUREMENT};

use super::los::is_los;
use super::scenario::Scenario;

/// Extra attenuation applied to the strength proxy when the path is blocked.
pub const NLOS_PENALTY_DB: f64 = 10.0;

/// Log-distance signal-strength proxy used by the "strongest" selection.
pub fn rss_proxy(distance_m: f64, los: bool) -> f64 {
    let penalty = if los { 0.0 } else { NLOS_PENALTY_DB };
    -(20.0 * distance_m.max(0.1).log10() + penalty)
}

/// A synthesized measurement together with simulator-side truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub measurement: TagMeasurement,
    pub los: bool,
    pub true_range_m: f64,
    /// Strength proxy computed from the measured range.
    pub rss: f64,
}

/// Noisy observations of every anchor within detection range of `pose`.
///
/// Noise for anchor `id` at sample `index` comes from its own random stream,
/// so results do not depend on evaluation order or on which other anchors
/// exist in the scenario.
pub fn synthesize_observations(pose: &Pose, index: u64, scenario: &Scenario) -> Vec<Observation> {
    let noise = &scenario.noise;
    let mut out = Vec::new();
    for anchor in &scenario.anchors {
        let distance = euclidean_distance(pose.position, anchor.position);
        if distance > noise.detection_radius_m {
            continue;
        }
        let los = is_los(pose.position, anchor.position, &scenario.walls);
        let mut rng = stream(scenario.seed, DOMAIN_MEASUREMENT, index, anchor.id as u64);
        let range_z: f64 = StandardNormal.sample(&mut rng);
        let bearing_z: f64 = StandardNormal.sample(&mut rng);

        let bias = if los { 0.0 } else { noise.range_bias_nlos_m };
        let range = (distance + bias + noise.range_sigma(distance, los) * range_z).max(0.0);
        let true_bearing = if distance > 0.0 {
            pose.world_to_relative(anchor.position).angle()
        } else {
            0.0
        };
        let bearing = wrap_angle(true_bearing + noise.bearing_sigma_rad * bearing_z);

        out.push(Observation {
            measurement: TagMeasurement {
                anchor_id: anchor.id,
                range_m: range,
                bearing_rad: bearing,
                timestamp: pose.timestamp,
            },
            los,
            true_range_m: distance,
            rss: rss_proxy(range, los),
        });
    }
    out
}

pub fn synthesize_measurements(pose: &Pose, index: u64, scenario: &Scenario) -> Vec<TagMeasurement> {
    synthesize_observations(pose, index, scenario)
        .into_iter()
        .map(|o| o.measurement)
        .collect()
}
