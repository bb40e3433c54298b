//! Auxiliary phone sensors: GPS quality, ambient light, accelerometer
//! activity, gyroscope and magnetometer heading.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::model::{angle_diff, wrap_angle, Pose};
use crate::rng::{stream, DOMAIN_SENSOR};

use super::scenario::{IndoorInterval, Scenario};

pub const GPS_SNR_OUTDOOR: f64 = 40.0;
pub const GPS_SNR_INDOOR: f64 = 5.0;
pub const GPS_SNR_JITTER: f64 = 2.0;
pub const LIGHT_OUTDOOR_LUX: f64 = 2000.0;
pub const LIGHT_INDOOR_LUX: f64 = 120.0;
/// Duration of the outdoor/indoor crossfade, centered on each boundary.
pub const TRANSITION_RAMP_S: f64 = 3.0;

const ACCEL_VAR_WALKING: f64 = 0.8;
const ACCEL_VAR_STILL: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorSample {
    pub timestamp: f64,
    pub gps_snr: f64,
    pub light_lux: f64,
    pub accel_var: f64,
    pub gyro_rate: f64,
    pub mag_heading: f64,
}

/// 0 when fully outdoors, 1 when fully indoors, linear in between.
pub fn indoor_fraction(t: f64, interval: Option<&IndoorInterval>) -> f64 {
    let Some(span) = interval else {
        return 0.0;
    };
    let half = TRANSITION_RAMP_S / 2.0;
    let entering = ((t - (span.start_s - half)) / TRANSITION_RAMP_S).clamp(0.0, 1.0);
    let leaving = match span.end_s {
        Some(end) => (((end + half) - t) / TRANSITION_RAMP_S).clamp(0.0, 1.0),
        None => 1.0,
    };
    entering.min(leaving)
}

/// Sensor samples aligned one-to-one with `ground_truth`.
///
/// `indoor` of `None` produces an all-outdoor trace.
pub fn synthesize_sensor_stream(
    scenario: &Scenario,
    ground_truth: &[Pose],
    indoor: Option<&IndoorInterval>,
) -> Vec<SensorSample> {
    let noise = &scenario.noise;
    let mut out = Vec::with_capacity(ground_truth.len());
    for (i, pose) in ground_truth.iter().enumerate() {
        let mut rng = stream(scenario.seed, DOMAIN_SENSOR, i as u64, 0);
        let gps_jitter: f64 = rng.random_range(-GPS_SNR_JITTER..=GPS_SNR_JITTER);
        let light_jitter: f64 = rng.random_range(-0.1..=0.1);
        let accel_jitter: f64 = rng.random_range(0.0..=0.05);
        let mag_z: f64 = StandardNormal.sample(&mut rng);

        let f = indoor_fraction(pose.timestamp, indoor);
        let gps_snr = (GPS_SNR_OUTDOOR + (GPS_SNR_INDOOR - GPS_SNR_OUTDOOR) * f + gps_jitter).max(0.0);
        let light = LIGHT_OUTDOOR_LUX + (LIGHT_INDOOR_LUX - LIGHT_OUTDOOR_LUX) * f;
        let light_lux = (light * (1.0 + light_jitter)).max(0.0);

        let (true_rate, moving) = match i.checked_sub(1).map(|j| &ground_truth[j]) {
            Some(prev) => {
                let dt = pose.timestamp - prev.timestamp;
                let rate = angle_diff(pose.heading, prev.heading) / dt;
                let speed = (pose.position - prev.position).norm() / dt;
                (rate, speed > 0.05)
            }
            None => (0.0, false),
        };
        let accel_var = if moving { ACCEL_VAR_WALKING } else { ACCEL_VAR_STILL } + accel_jitter;

        let disturbance: f64 = noise
            .mag_disturbance
            .iter()
            .filter(|d| d.contains(pose.timestamp))
            .map(|d| d.offset_rad)
            .sum();
        let mag_heading = wrap_angle(pose.heading + noise.mag_sigma_rad * mag_z + disturbance);

        out.push(SensorSample {
            timestamp: pose.timestamp,
            gps_snr,
            light_lux,
            accel_var,
            gyro_rate: true_rate + noise.gyro_drift_rad_per_s,
            mag_heading,
        });
    }
    out
}
