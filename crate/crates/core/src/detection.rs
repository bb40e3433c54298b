//! Outdoor/indoor transition detection from GPS quality and ambient light.
//!
//! A three-state machine (`Outdoor` ↔ `Transition` ↔ `Indoor`) over
//! exponentially smoothed GPS SNR and light level. GPS thresholds use
//! hysteresis and a transition must persist for `dwell_s` seconds before an
//! event fires.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::SensorSample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    pub gps_low_threshold: f64,
    pub gps_high_threshold: f64,
    pub light_indoor_threshold: f64,
    pub dwell_s: f64,
    pub ema_alpha: f64,
    /// Also require accelerometer activity before declaring a transition.
    pub require_motion: bool,
    pub accel_var_threshold: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            gps_low_threshold: 15.0,
            gps_high_threshold: 25.0,
            light_indoor_threshold: 200.0,
            dwell_s: 3.0,
            ema_alpha: 0.2,
            require_motion: false,
            accel_var_threshold: 0.1,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.ema_alpha > 0.0 && self.ema_alpha <= 1.0) {
            return Err(Error::Config(format!(
                "ema_alpha must be in (0, 1], got {}",
                self.ema_alpha
            )));
        }
        if self.gps_high_threshold.partial_cmp(&self.gps_low_threshold) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Config("gps_high_threshold must exceed gps_low_threshold".into()));
        }
        if !(self.dwell_s.is_finite() && self.dwell_s >= 0.0) {
            return Err(Error::Config("dwell_s must be >= 0".into()));
        }
        if !self.light_indoor_threshold.is_finite() || !self.accel_var_threshold.is_finite() {
            return Err(Error::Config("detector thresholds must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetectorMode {
    Outdoor,
    Transition,
    Indoor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetectorEvent {
    WentIndoor,
    WentOutdoor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorState {
    pub mode: DetectorMode,
    pub mode_entered_at: f64,
    pub gps_ema: f64,
    pub light_ema: f64,
    /// Last settled mode; tells which way a `Transition` is heading.
    settled: DetectorMode,
    last_timestamp: Option<f64>,
}

impl Default for DetectorState {
    fn default() -> Self {
        Self::outdoor()
    }
}

impl DetectorState {
    /// Initial state. The first sample seeds both moving averages.
    pub fn outdoor() -> Self {
        Self {
            mode: DetectorMode::Outdoor,
            mode_entered_at: 0.0,
            gps_ema: 0.0,
            light_ema: 0.0,
            settled: DetectorMode::Outdoor,
            last_timestamp: None,
        }
    }

    pub fn is_indoor(&self) -> bool {
        self.settled == DetectorMode::Indoor && self.mode == DetectorMode::Indoor
    }
}

const TIME_EPS: f64 = 1e-9;

pub fn detector_step(
    state: &DetectorState,
    sample: &SensorSample,
    config: &DetectorConfig,
) -> Result<(DetectorState, Option<DetectorEvent>)> {
    let t = sample.timestamp;
    if !t.is_finite() {
        return Err(Error::NonFinite("sensor timestamp"));
    }
    let mut next = state.clone();
    match state.last_timestamp {
        Some(previous) if t <= previous => return Err(Error::OutOfOrder { previous, got: t }),
        Some(_) => {
            let a = config.ema_alpha;
            next.gps_ema += a * (sample.gps_snr - next.gps_ema);
            next.light_ema += a * (sample.light_lux - next.light_ema);
        }
        None => {
            next.gps_ema = sample.gps_snr;
            next.light_ema = sample.light_lux;
            next.mode_entered_at = t;
        }
    }
    next.last_timestamp = Some(t);

    let enter = |s: &mut DetectorState, mode| {
        s.mode = mode;
        s.mode_entered_at = t;
    };

    match next.mode {
        DetectorMode::Outdoor if next.gps_ema < config.gps_low_threshold => {
            enter(&mut next, DetectorMode::Transition);
        }
        DetectorMode::Indoor if next.gps_ema > config.gps_high_threshold => {
            enter(&mut next, DetectorMode::Transition);
        }
        _ => {}
    }

    let mut event = None;
    if next.mode == DetectorMode::Transition {
        let held = t - next.mode_entered_at + TIME_EPS >= config.dwell_s;
        let motion_ok = !config.require_motion || sample.accel_var >= config.accel_var_threshold;
        match next.settled {
            DetectorMode::Outdoor => {
                if next.gps_ema >= config.gps_low_threshold {
                    enter(&mut next, DetectorMode::Outdoor);
                } else if held && motion_ok && next.light_ema < config.light_indoor_threshold {
                    enter(&mut next, DetectorMode::Indoor);
                    next.settled = DetectorMode::Indoor;
                    event = Some(DetectorEvent::WentIndoor);
                }
            }
            _ => {
                if next.gps_ema <= config.gps_high_threshold {
                    enter(&mut next, DetectorMode::Indoor);
                } else if held && motion_ok && next.light_ema >= config.light_indoor_threshold {
                    enter(&mut next, DetectorMode::Outdoor);
                    next.settled = DetectorMode::Outdoor;
                    event = Some(DetectorEvent::WentOutdoor);
                }
            }
        }
    }
    Ok((next, event))
}

/// Owning wrapper around [`detector_step`].
#[derive(Debug, Clone)]
pub struct Detector {
    pub config: DetectorConfig,
    state: DetectorState,
}

impl Detector {
    pub fn new(config: DetectorConfig) -> Self {
        Self {
            config,
            state: DetectorState::outdoor(),
        }
    }

    pub fn state(&self) -> &DetectorState {
        &self.state
    }

    pub fn step(&mut self, sample: &SensorSample) -> Result<Option<DetectorEvent>> {
        let (state, event) = detector_step(&self.state, sample, &self.config)?;
        self.state = state;
        Ok(event)
    }

    /// Runs a whole stream, returning `(timestamp, event)` pairs.
    pub fn run(&mut self, samples: &[SensorSample]) -> Result<Vec<(f64, DetectorEvent)>> {
        let mut events = Vec::new();
        for s in samples {
            if let Some(e) = self.step(s)? {
                events.push((s.timestamp, e));
            }
        }
        Ok(events)
    }
}
