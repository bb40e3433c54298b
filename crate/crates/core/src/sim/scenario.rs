//! Scenario description and its JSON file format.
//!
//! Internally every angle is in radians. The file format uses degrees for
//! angles (`*_deg` keys) and meters/seconds elsewhere.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detection::DetectorConfig;
use crate::error::{Error, Result};
use crate::model::{is_collinear, AnchorTag, Vec2};

/// A wall as a closed line segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Vec2,
    pub b: Vec2,
}

impl Segment {
    pub fn new(a: Vec2, b: Vec2) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        (self.b - self.a).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub position: Vec2,
    /// Time spent standing at this waypoint on arrival.
    pub dwell_s: f64,
}

/// Time span during which the magnetometer reads a constant extra offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagDisturbance {
    pub start_s: f64,
    pub end_s: f64,
    pub offset_rad: f64,
}

impl MagDisturbance {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.start_s && t < self.end_s
    }
}

/// Time span spent indoors. An open end means "until the trajectory ends".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndoorInterval {
    pub start_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_s: Option<f64>,
}

impl IndoorInterval {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.start_s && self.end_s.is_none_or(|end| t < end)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub range_sigma_los_m: f64,
    pub range_sigma_nlos_m: f64,
    pub range_bias_nlos_m: f64,
    /// Extra standard deviation per meter of true distance.
    pub range_sigma_per_m: f64,
    pub bearing_sigma_rad: f64,
    pub detection_radius_m: f64,
    pub gyro_drift_rad_per_s: f64,
    pub mag_sigma_rad: f64,
    pub mag_disturbance: Vec<MagDisturbance>,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            range_sigma_los_m: 0.05,
            range_sigma_nlos_m: 0.15,
            range_bias_nlos_m: 0.10,
            range_sigma_per_m: 0.01,
            bearing_sigma_rad: 5f64.to_radians(),
            detection_radius_m: 15.0,
            gyro_drift_rad_per_s: 0.002,
            mag_sigma_rad: 0.02,
            mag_disturbance: Vec::new(),
        }
    }
}

impl NoiseModel {
    /// Every stochastic term set to zero; detection radius kept.
    pub fn noiseless() -> Self {
        Self {
            range_sigma_los_m: 0.0,
            range_sigma_nlos_m: 0.0,
            range_bias_nlos_m: 0.0,
            range_sigma_per_m: 0.0,
            bearing_sigma_rad: 0.0,
            gyro_drift_rad_per_s: 0.0,
            mag_sigma_rad: 0.0,
            ..Self::default()
        }
    }

    /// Ranging standard deviation for a given true distance.
    pub fn range_sigma(&self, distance: f64, los: bool) -> f64 {
        let base = if los {
            self.range_sigma_los_m
        } else {
            self.range_sigma_nlos_m
        };
        base + self.range_sigma_per_m * distance
    }

    fn validate(&self) -> Result<()> {
        let sigmas = [
            ("range_sigma_los", self.range_sigma_los_m),
            ("range_sigma_nlos", self.range_sigma_nlos_m),
            ("range_bias_nlos", self.range_bias_nlos_m),
            ("range_sigma_per_m", self.range_sigma_per_m),
            ("bearing_sigma", self.bearing_sigma_rad),
            ("mag_sigma", self.mag_sigma_rad),
        ];
        for (name, value) in sigmas {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidScenario(format!(
                    "noise.{name} must be finite and >= 0, got {value}"
                )));
            }
        }
        if !(self.detection_radius_m.is_finite() && self.detection_radius_m > 0.0) {
            return Err(Error::InvalidScenario("noise.detection_radius_m must be > 0".into()));
        }
        if !self.gyro_drift_rad_per_s.is_finite() {
            return Err(Error::InvalidScenario("noise.gyro_drift must be finite".into()));
        }
        if self.range_sigma_nlos_m < self.range_sigma_los_m {
            return Err(Error::InvalidScenario(
                "noise.range_sigma_nlos_m must be >= range_sigma_los_m".into(),
            ));
        }
        for d in &self.mag_disturbance {
            if !(d.start_s.is_finite() && d.end_s.is_finite() && d.offset_rad.is_finite()) || d.end_s < d.start_s {
                return Err(Error::InvalidScenario(format!(
                    "malformed magnetometer disturbance {d:?}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub walls: Vec<Segment>,
    pub anchors: Vec<AnchorTag>,
    pub waypoints: Vec<Waypoint>,
    pub speed_mps: f64,
    pub sample_hz: f64,
    pub noise: NoiseModel,
    pub seed: u64,
    pub detector: DetectorConfig,
    /// `None` means the whole trajectory is indoors.
    pub indoor_interval: Option<IndoorInterval>,
}

impl Scenario {
    /// Checks every structural invariant. Returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.anchors.is_empty() {
            return bad("at least one anchor is required".into());
        }
        if self.waypoints.len() < 2 {
            return bad("at least two waypoints are required".into());
        }
        if !(self.speed_mps.is_finite() && self.speed_mps > 0.0) {
            return bad(format!("speed_mps must be > 0, got {}", self.speed_mps));
        }
        if !(self.sample_hz.is_finite() && self.sample_hz > 0.0) {
            return bad(format!("sample_hz must be > 0, got {}", self.sample_hz));
        }
        let mut ids = BTreeSet::new();
        for anchor in &self.anchors {
            if !anchor.position.is_finite() {
                return bad(format!("anchor {} has a non-finite position", anchor.id));
            }
            if !ids.insert(anchor.id) {
                return bad(format!("duplicate anchor id {}", anchor.id));
            }
        }
        for (i, wall) in self.walls.iter().enumerate() {
            if !(wall.a.is_finite() && wall.b.is_finite()) {
                return bad(format!("wall {i} has non-finite endpoints"));
            }
            if wall.length() == 0.0 {
                return bad(format!("wall {i} has zero length"));
            }
        }
        for (i, wp) in self.waypoints.iter().enumerate() {
            if !wp.position.is_finite() || !(wp.dwell_s.is_finite() && wp.dwell_s >= 0.0) {
                return bad(format!("waypoint {i} is malformed"));
            }
        }
        for (i, pair) in self.waypoints.windows(2).enumerate() {
            if pair[0].position == pair[1].position && pair[1].dwell_s == 0.0 {
                return bad(format!("waypoints {i} and {} coincide with zero dwell", i + 1));
            }
        }
        if let Some(span) = &self.indoor_interval {
            if !span.start_s.is_finite() || span.end_s.is_some_and(|e| e.is_nan() || e < span.start_s) {
                return bad("malformed indoor_interval".into());
            }
        }
        self.noise.validate()?;
        self.detector.validate()?;

        let mut warnings = Vec::new();
        let positions: Vec<Vec2> = self.anchors.iter().map(|a| a.position).collect();
        if positions.len() >= 3 && is_collinear(&positions, 1e-6) {
            warnings.push("all anchors are collinear; multilateration is degenerate".into());
        }
        if positions.len() < 3 {
            warnings.push(format!("only {} anchor(s); multilateration needs 3", positions.len()));
        }
        Ok(warnings)
    }

    pub fn anchor(&self, id: u32) -> Option<&AnchorTag> {
        self.anchors.iter().find(|a| a.id == id)
    }

    /// Keeps the `count` anchors with the smallest ids.
    pub fn with_anchor_prefix(&self, count: usize) -> Scenario {
        let mut anchors = self.anchors.clone();
        anchors.sort_by_key(|a| a.id);
        anchors.truncate(count);
        Scenario {
            anchors,
            ..self.clone()
        }
    }

    pub fn from_json(text: &str) -> Result<Scenario> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidScenario(format!("malformed scenario JSON: {e}")))?;
        let scenario = Scenario::from(file);
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ScenarioFile::from(self)).expect("scenario serializes")
    }

    pub fn load(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidScenario(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

// ---------------------------------------------------------------------------
// File format

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    #[serde(default)]
    walls: Vec<[[f64; 2]; 2]>,
    anchors: Vec<AnchorEntry>,
    waypoints: Vec<WaypointEntry>,
    speed_mps: f64,
    sample_hz: f64,
    #[serde(default)]
    noise: NoiseEntry,
    seed: u64,
    #[serde(default)]
    detector: DetectorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    indoor_interval: Option<IndoorInterval>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnchorEntry {
    id: u32,
    x: f64,
    y: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WaypointEntry {
    x: f64,
    y: f64,
    #[serde(default)]
    dwell_s: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DisturbanceEntry {
    start_s: f64,
    end_s: f64,
    offset_deg: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct NoiseEntry {
    range_sigma_los_m: f64,
    range_sigma_nlos_m: f64,
    range_bias_nlos_m: f64,
    range_sigma_per_m: f64,
    bearing_sigma_deg: f64,
    detection_radius_m: f64,
    gyro_drift_deg_per_s: f64,
    mag_sigma_deg: f64,
    mag_disturbance: Vec<DisturbanceEntry>,
}

impl Default for NoiseEntry {
    fn default() -> Self {
        NoiseEntry::from(&NoiseModel::default())
    }
}

impl From<&NoiseModel> for NoiseEntry {
    fn from(n: &NoiseModel) -> Self {
        NoiseEntry {
            range_sigma_los_m: n.range_sigma_los_m,
            range_sigma_nlos_m: n.range_sigma_nlos_m,
            range_bias_nlos_m: n.range_bias_nlos_m,
            range_sigma_per_m: n.range_sigma_per_m,
            bearing_sigma_deg: n.bearing_sigma_rad.to_degrees(),
            detection_radius_m: n.detection_radius_m,
            gyro_drift_deg_per_s: n.gyro_drift_rad_per_s.to_degrees(),
            mag_sigma_deg: n.mag_sigma_rad.to_degrees(),
            mag_disturbance: n
                .mag_disturbance
                .iter()
                .map(|d| DisturbanceEntry {
                    start_s: d.start_s,
                    end_s: d.end_s,
                    offset_deg: d.offset_rad.to_degrees(),
                })
                .collect(),
        }
    }
}

impl From<NoiseEntry> for NoiseModel {
    fn from(n: NoiseEntry) -> Self {
        NoiseModel {
            range_sigma_los_m: n.range_sigma_los_m,
            range_sigma_nlos_m: n.range_sigma_nlos_m,
            range_bias_nlos_m: n.range_bias_nlos_m,
            range_sigma_per_m: n.range_sigma_per_m,
            bearing_sigma_rad: n.bearing_sigma_deg.to_radians(),
            detection_radius_m: n.detection_radius_m,
            gyro_drift_rad_per_s: n.gyro_drift_deg_per_s.to_radians(),
            mag_sigma_rad: n.mag_sigma_deg.to_radians(),
            mag_disturbance: n
                .mag_disturbance
                .into_iter()
                .map(|d| MagDisturbance {
                    start_s: d.start_s,
                    end_s: d.end_s,
                    offset_rad: d.offset_deg.to_radians(),
                })
                .collect(),
        }
    }
}

impl From<ScenarioFile> for Scenario {
    fn from(f: ScenarioFile) -> Self {
        Scenario {
            name: f.name,
            walls: f
                .walls
                .into_iter()
                .map(|[a, b]| Segment::new(Vec2::new(a[0], a[1]), Vec2::new(b[0], b[1])))
                .collect(),
            anchors: f.anchors.into_iter().map(|a| AnchorTag::new(a.id, a.x, a.y)).collect(),
            waypoints: f
                .waypoints
                .into_iter()
                .map(|w| Waypoint {
                    position: Vec2::new(w.x, w.y),
                    dwell_s: w.dwell_s,
                })
                .collect(),
            speed_mps: f.speed_mps,
            sample_hz: f.sample_hz,
            noise: f.noise.into(),
            seed: f.seed,
            detector: f.detector,
            indoor_interval: f.indoor_interval,
        }
    }
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        ScenarioFile {
            name: s.name.clone(),
            walls: s.walls.iter().map(|w| [[w.a.x, w.a.y], [w.b.x, w.b.y]]).collect(),
            anchors: s
                .anchors
                .iter()
                .map(|a| AnchorEntry {
                    id: a.id,
                    x: a.position.x,
                    y: a.position.y,
                })
                .collect(),
            waypoints: s
                .waypoints
                .iter()
                .map(|w| WaypointEntry {
                    x: w.position.x,
                    y: w.position.y,
                    dwell_s: w.dwell_s,
                })
                .collect(),
            speed_mps: s.speed_mps,
            sample_hz: s.sample_hz,
            noise: NoiseEntry::from(&s.noise),
            seed: s.seed,
            detector: s.detector.clone(),
            indoor_interval: s.indoor_interval,
        }
    }
}
