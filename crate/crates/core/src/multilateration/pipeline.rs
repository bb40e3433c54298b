use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{AnchorTag, TagMeasurement};
use crate::oneshot::one_shot_fix;
use crate::selector::{select, HistoryConfig, RangeHistory, SelectionPolicy};
use crate::sim::NoiseModel;

use super::solver::{linear_init, solve_fix_with, FixMethod, FixResult, RangeObservation, SolverConfig};

/// Where per-anchor range standard deviations come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightSource {
    /// Sample variance of the recent range window, prior while it is short.
    #[default]
    Window,
    /// The noise-model prior at the measured range.
    Prior,
    /// Equal weights.
    Uniform,
}

#[derive(Debug, Clone)]
pub struct MultishotConfig {
    pub weights: WeightSource,
    pub policy: SelectionPolicy,
    /// Lower bound on the per-anchor standard deviation used for weights.
    pub sigma_floor_m: f64,
    /// Share of the one-shot estimate when blending with the previous fix.
    pub blend_ratio: f64,
    /// Source of prior range sigmas while an anchor's window is short.
    pub prior: NoiseModel,
    pub solver: SolverConfig,
}

impl Default for MultishotConfig {
    fn default() -> Self {
        Self {
            weights: WeightSource::default(),
            policy: SelectionPolicy::default(),
            sigma_floor_m: 0.02,
            blend_ratio: 0.5,
            prior: NoiseModel::default(),
            solver: SolverConfig::default(),
        }
    }
}

impl MultishotConfig {
    fn weight(&self, m: &TagMeasurement, history: &RangeHistory) -> f64 {
        let prior = || {
            let sigma = self.prior.range_sigma(m.range_m, true);
            sigma * sigma
        };
        let variance = match self.weights {
            WeightSource::Window => history.variance(m.anchor_id).unwrap_or_else(prior),
            WeightSource::Prior => prior(),
            WeightSource::Uniform => 1.0,
        };
        1.0 / variance.max(self.sigma_floor_m * self.sigma_floor_m)
    }
}

fn nearest(measurements: &[TagMeasurement]) -> Option<&TagMeasurement> {
    measurements
        .iter()
        .min_by(|a, b| a.range_m.total_cmp(&b.range_m).then(a.anchor_id.cmp(&b.anchor_id)))
}

/// One localization step for one pose.
///
/// Three or more selected anchors are solved by weighted multilateration;
/// one or two fall back to a single-anchor fix blended with the previous
/// position; none carries the previous position forward. Returns `None` only
/// when nothing is visible and there is no previous fix.
#[allow(clippy::too_many_arguments)]
pub fn multishot_step(
    previous: Option<&FixResult>,
    heading: f64,
    measurements: &[TagMeasurement],
    anchors: &BTreeMap<u32, AnchorTag>,
    history: &RangeHistory,
    rss: Option<&BTreeMap<u32, f64>>,
    config: &MultishotConfig,
) -> Result<Option<FixResult>> {
    for m in measurements {
        if !anchors.contains_key(&m.anchor_id) {
            return Err(Error::UnknownAnchor(m.anchor_id));
        }
    }
    let selected = select(measurements, history, &config.policy, rss)?;

    if selected.len() >= 3 {
        let obs: Vec<RangeObservation> = selected
            .iter()
            .map(|m| RangeObservation {
                anchor_id: m.anchor_id,
                position: anchors[&m.anchor_id].position,
                range_m: m.range_m,
                weight: config.weight(m, history),
            })
            .collect();
        let init = match previous {
            Some(prev) => prev.position,
            None => {
                let pairs: Vec<_> = obs.iter().map(|o| (o.position, o.range_m)).collect();
                match linear_init(&pairs) {
                    Ok(p) => p,
                    Err(_) => {
                        let m = nearest(&selected).expect("non-empty selection");
                        one_shot_fix(heading, m, &anchors[&m.anchor_id])?
                    }
                }
            }
        };
        return solve_fix_with(&obs, init, &config.solver).map(Some);
    }

    if let Some(m) = nearest(&selected) {
        let single = one_shot_fix(heading, m, &anchors[&m.anchor_id])?;
        let position = match previous {
            Some(prev) => single * config.blend_ratio + prev.position * (1.0 - config.blend_ratio),
            None => single,
        };
        return Ok(Some(FixResult {
            position,
            residual_rms_m: 0.0,
            anchors_used: vec![m.anchor_id],
            method: FixMethod::OneShot,
            condition_ok: true,
        }));
    }

    Ok(previous.map(|prev| FixResult {
        position: prev.position,
        residual_rms_m: 0.0,
        anchors_used: Vec::new(),
        method: FixMethod::DeadReckoned,
        condition_ok: prev.condition_ok,
    }))
}

/// Per-device localization state: range history plus the last fix.
#[derive(Debug, Clone)]
pub struct Localizer {
    config: MultishotConfig,
    anchors: BTreeMap<u32, AnchorTag>,
    history: RangeHistory,
    last: Option<FixResult>,
}

impl Localizer {
    pub fn new(anchors: &[AnchorTag], config: MultishotConfig, history: HistoryConfig) -> Self {
        Self {
            config,
            anchors: anchors.iter().map(|a| (a.id, *a)).collect(),
            history: RangeHistory::new(history),
            last: None,
        }
    }

    pub fn last_fix(&self) -> Option<&FixResult> {
        self.last.as_ref()
    }

    pub fn history(&self) -> &RangeHistory {
        &self.history
    }

    pub fn step(
        &mut self,
        now: f64,
        heading: f64,
        measurements: &[TagMeasurement],
        rss: Option<&BTreeMap<u32, f64>>,
    ) -> Result<Option<FixResult>> {
        if let Some(m) = measurements.iter().find(|m| !self.anchors.contains_key(&m.anchor_id)) {
            return Err(Error::UnknownAnchor(m.anchor_id));
        }
        self.history.update(now, measurements)?;
        let fix = multishot_step(
            self.last.as_ref(),
            heading,
            measurements,
            &self.anchors,
            &self.history,
            rss,
            &self.config,
        )?;
        if fix.is_some() {
            self.last.clone_from(&fix);
        }
        Ok(fix)
    }

    /// Forgets the previous fix and all range history.
    pub fn reset(&mut self) {
        self.history = RangeHistory::new(*self.history.config());
        self.last = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Pose, Vec2};
    use crate::selector::SelectionKind;
    use crate::sim::{builtin, synthesize_measurements, NoiseModel};

    fn noiseless_campus() -> crate::sim::Scenario {
        let mut s = builtin::campus();
        s.noise = NoiseModel::noiseless();
        s
    }

    fn anchor_map(s: &crate::sim::Scenario) -> BTreeMap<u32, AnchorTag> {
        s.anchors.iter().map(|a| (a.id, *a)).collect()
    }

    #[test]
    fn exact_data_multilaterates_to_truth() {
        let s = noiseless_campus();
        let pose = Pose::new(Vec2::new(22.0, 14.0), 0.0, 0.0);
        let ms = synthesize_measurements(&pose, 0, &s);
        assert!(ms.len() >= 6);
        let history = RangeHistory::new(HistoryConfig::default());
        let fix = multishot_step(
            None,
            0.0,
            &ms,
            &anchor_map(&s),
            &history,
            None,
            &MultishotConfig::default(),
        )
        .unwrap()
        .unwrap();
        assert_eq!(fix.method, FixMethod::Multilateration);
        assert_eq!(fix.anchors_used.len(), 6);
        assert!((fix.position - pose.position).norm() < 1e-6);
    }

    #[test]
    fn single_anchor_falls_back_to_one_shot() {
        let mut s = noiseless_campus();
        s.anchors = vec![AnchorTag::new(4, 6.0, 3.0)];
        let pose = Pose::new(Vec2::new(3.0, 1.0), 0.7, 0.0);
        let ms = synthesize_measurements(&pose, 0, &s);
        assert_eq!(ms.len(), 1);
        let history = RangeHistory::new(HistoryConfig::default());
        let config = MultishotConfig::default();
        let fix = multishot_step(None, pose.heading, &ms, &anchor_map(&s), &history, None, &config)
            .unwrap()
            .unwrap();
        assert_eq!(fix.method, FixMethod::OneShot);
        assert!((fix.position - pose.position).norm() < 1e-9);

        // with a previous fix the result is the midpoint
        let prev = FixResult {
            position: Vec2::new(5.0, 1.0),
            residual_rms_m: 0.0,
            anchors_used: vec![],
            method: FixMethod::Multilateration,
            condition_ok: true,
        };
        let fix = multishot_step(Some(&prev), pose.heading, &ms, &anchor_map(&s), &history, None, &config)
            .unwrap()
            .unwrap();
        assert!((fix.position - Vec2::new(4.0, 1.0)).norm() < 1e-9);
    }

    #[test]
    fn nothing_visible_dead_reckons() {
        let s = noiseless_campus();
        let history = RangeHistory::new(HistoryConfig::default());
        let config = MultishotConfig::default();
        assert_eq!(
            multishot_step(None, 0.0, &[], &anchor_map(&s), &history, None, &config).unwrap(),
            None
        );
        let prev = FixResult {
            position: Vec2::new(2.0, 3.0),
            residual_rms_m: 0.1,
            anchors_used: vec![1, 2, 3],
            method: FixMethod::Multilateration,
            condition_ok: true,
        };
        let fix = multishot_step(Some(&prev), 0.0, &[], &anchor_map(&s), &history, None, &config)
            .unwrap()
            .unwrap();
        assert_eq!(fix.method, FixMethod::DeadReckoned);
        assert_eq!(fix.position, prev.position);
        assert!(fix.anchors_used.is_empty());
    }

    #[test]
    fn unknown_anchor_is_rejected() {
        let s = noiseless_campus();
        let history = RangeHistory::new(HistoryConfig::default());
        let ms = [TagMeasurement {
            anchor_id: 99,
            range_m: 1.0,
            bearing_rad: 0.0,
            timestamp: 0.0,
        }];
        let err = multishot_step(
            None,
            0.0,
            &ms,
            &anchor_map(&s),
            &history,
            None,
            &MultishotConfig::default(),
        );
        assert_eq!(err, Err(Error::UnknownAnchor(99)));
    }

    #[test]
    fn localizer_accumulates_history_and_resets() {
        let s = noiseless_campus();
        let mut loc = Localizer::new(
            &s.anchors,
            MultishotConfig {
                policy: SelectionPolicy::new(SelectionKind::All, 1).unwrap(),
                ..Default::default()
            },
            HistoryConfig::default(),
        );
        for i in 0..5 {
            let pose = Pose::new(Vec2::new(22.0 + 0.1 * i as f64, 14.0), 0.0, i as f64 * 0.1);
            let ms = synthesize_measurements(&pose, i, &s);
            let fix = loc.step(pose.timestamp, 0.0, &ms, None).unwrap().unwrap();
            assert!((fix.position - pose.position).norm() < 1e-6);
        }
        assert_eq!(loc.history().len(2), 5);
        loc.reset();
        assert!(loc.last_fix().is_none());
        assert_eq!(loc.history().len(2), 0);
    }
}
