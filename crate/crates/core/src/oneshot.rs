//! Single-pose localization: heading tracking from gyroscope and
//! magnetometer, and polar-to-Cartesian anchor projection.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{angle_diff, wrap_angle, AnchorTag, Pose, TagMeasurement, Vec2};
use crate::sim::SensorSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeadingSource {
    MagAnchored,
    GyroPropagated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadingEstimate {
    pub heading: f64,
    pub source: HeadingSource,
    /// Time of the most recent magnetometer anchor.
    pub anchored_at: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadingConfig {
    pub window: usize,
    /// Max disagreement between gyro and magnetometer heading change.
    pub agreement_rad: f64,
    /// Max circular spread of the magnetometer inside the window.
    pub max_circular_std_rad: f64,
}

impl Default for HeadingConfig {
    fn default() -> Self {
        Self {
            window: 10,
            agreement_rad: 0.05,
            max_circular_std_rad: 0.1,
        }
    }
}

const MIN_RELIABILITY_SAMPLES: usize = 3;

fn trapezoid(a: &SensorSample, b: &SensorSample) -> f64 {
    0.5 * (a.gyro_rate + b.gyro_rate) * (b.timestamp - a.timestamp)
}

/// Gyro rotation accumulated from each sample up to the newest one.
fn rotation_to_newest(window: &[SensorSample]) -> Vec<f64> {
    let mut acc = vec![0.0; window.len()];
    for j in (0..window.len().saturating_sub(1)).rev() {
        acc[j] = acc[j + 1] + trapezoid(&window[j], &window[j + 1]);
    }
    acc
}

/// Circular mean and circular standard deviation.
fn circular_stats(angles: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut s, mut c, mut n) = (0.0, 0.0, 0usize);
    for a in angles {
        let (sa, ca) = a.sin_cos();
        s += sa;
        c += ca;
        n += 1;
    }
    let r = (s.hypot(c) / n as f64).min(1.0);
    let std = if r > 0.0 { (-2.0 * r.ln()).sqrt() } else { f64::INFINITY };
    (wrap_angle(s.atan2(c)), std)
}

/// Magnetometer readings carried forward to the newest sample time with the
/// gyro, then averaged. Returns `(heading, circular std)`.
fn carried_mag_heading(window: &[SensorSample]) -> (f64, f64) {
    let rot = rotation_to_newest(window);
    circular_stats(window.iter().zip(&rot).map(|(s, r)| s.mag_heading + r))
}

impl HeadingEstimate {
    /// Absolute starting heading from the magnetometer window.
    pub fn from_window(window: &[SensorSample]) -> Result<Self> {
        let newest = window.last().ok_or(Error::Empty("heading window"))?;
        let (heading, _) = carried_mag_heading(window);
        Ok(Self {
            heading,
            source: HeadingSource::MagAnchored,
            anchored_at: newest.timestamp,
        })
    }
}

/// Advances `prev` to the newest sample of `window`.
///
/// The gyro is integrated over the newest step. The magnetometer is trusted
/// when its heading change across the window agrees with the gyro's and its
/// gyro-compensated spread is small; the heading is then re-anchored to the
/// gyro-compensated window mean.
pub fn fuse_heading(
    prev: &HeadingEstimate,
    window: &[SensorSample],
    config: &HeadingConfig,
) -> Result<HeadingEstimate> {
    let n = window.len();
    let newest = window.last().ok_or(Error::Empty("heading window"))?;
    let step = if n >= 2 {
        trapezoid(&window[n - 2], &window[n - 1])
    } else {
        0.0
    };
    let propagated = HeadingEstimate {
        heading: wrap_angle(prev.heading + step),
        source: HeadingSource::GyroPropagated,
        anchored_at: prev.anchored_at,
    };
    if n < MIN_RELIABILITY_SAMPLES {
        return Ok(propagated);
    }

    let gyro_change = rotation_to_newest(window)[0];
    let mag_change = angle_diff(newest.mag_heading, window[0].mag_heading);
    let agrees = angle_diff(gyro_change, mag_change).abs() < config.agreement_rad;
    let (mag_heading, spread) = carried_mag_heading(window);

    if agrees && spread < config.max_circular_std_rad {
        Ok(HeadingEstimate {
            heading: mag_heading,
            source: HeadingSource::MagAnchored,
            anchored_at: newest.timestamp,
        })
    } else {
        Ok(propagated)
    }
}

/// Sliding-window heading tracker for one device.
#[derive(Debug, Clone)]
pub struct HeadingTracker {
    config: HeadingConfig,
    window: VecDeque<SensorSample>,
    estimate: Option<HeadingEstimate>,
}

impl HeadingTracker {
    pub fn new(config: HeadingConfig) -> Self {
        Self {
            config,
            window: VecDeque::with_capacity(config.window),
            estimate: None,
        }
    }

    pub fn estimate(&self) -> Option<&HeadingEstimate> {
        self.estimate.as_ref()
    }

    pub fn push(&mut self, sample: SensorSample) -> Result<HeadingEstimate> {
        if let Some(last) = self.window.back() {
            if sample.timestamp <= last.timestamp {
                return Err(Error::OutOfOrder {
                    previous: last.timestamp,
                    got: sample.timestamp,
                });
            }
        }
        if self.window.len() == self.config.window.max(1) {
            self.window.pop_front();
        }
        self.window.push_back(sample);
        let window = self.window.make_contiguous();
        let next = match &self.estimate {
            None => HeadingEstimate::from_window(window)?,
            Some(prev) => fuse_heading(prev, window, &self.config)?,
        };
        self.estimate = Some(next);
        Ok(next)
    }
}

/// World position of the anchor seen in `m` from `pose`.
pub fn project_anchor(pose: &Pose, m: &TagMeasurement) -> Vec2 {
    pose.relative_to_world(m.device_offset())
}

/// User position implied by one range/bearing reading of a known anchor.
pub fn one_shot_fix(heading: f64, m: &TagMeasurement, anchor: &AnchorTag) -> Result<Vec2> {
    if m.anchor_id != anchor.id {
        return Err(Error::AnchorMismatch {
            measurement: m.anchor_id,
            anchor: anchor.id,
        });
    }
    Ok(anchor.position - m.device_offset().rotated(heading))
}
