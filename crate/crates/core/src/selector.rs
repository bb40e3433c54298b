//! Anchor subset selection ahead of multilateration.

use std::cmp::Ordering;
use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::TagMeasurement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionKind {
    All,
    Nearest,
    Farthest,
    LeastVariance,
    Strongest,
}

impl SelectionKind {
    pub const ALL_KINDS: [SelectionKind; 5] = [
        SelectionKind::All,
        SelectionKind::Nearest,
        SelectionKind::Farthest,
        SelectionKind::LeastVariance,
        SelectionKind::Strongest,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SelectionKind::All => "all",
            SelectionKind::Nearest => "nearest",
            SelectionKind::Farthest => "farthest",
            SelectionKind::LeastVariance => "least-variance",
            SelectionKind::Strongest => "strongest",
        }
    }
}

impl fmt::Display for SelectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SelectionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL_KINDS
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown selection policy '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionPolicy {
    pub kind: SelectionKind,
    /// Ignored for [`SelectionKind::All`].
    pub k: usize,
}

impl Default for SelectionPolicy {
    fn default() -> Self {
        Self {
            kind: SelectionKind::Nearest,
            k: 6,
        }
    }
}

impl SelectionPolicy {
    pub fn new(kind: SelectionKind, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        Ok(Self { kind, k })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryConfig {
    pub window: usize,
    /// Anchors with fewer readings rank last under least-variance.
    pub min_samples: usize,
    pub expiry_s: f64,
}

impl Default for HistoryConfig {
    fn default() -> Self {
        Self {
            window: 10,
            min_samples: 3,
            expiry_s: 10.0,
        }
    }
}

/// Per-anchor sliding window of recent range readings.
#[derive(Debug, Clone)]
pub struct RangeHistory {
    config: HistoryConfig,
    buffers: BTreeMap<u32, VecDeque<(f64, f64)>>,
    latest: Option<f64>,
}

impl RangeHistory {
    pub fn new(config: HistoryConfig) -> Self {
        Self {
            config,
            buffers: BTreeMap::new(),
            latest: None,
        }
    }

    pub fn config(&self) -> &HistoryConfig {
        &self.config
    }

    /// Appends one batch of readings taken at `now`, evicting beyond the
    /// window and dropping anchors silent for longer than the expiry.
    pub fn update(&mut self, now: f64, measurements: &[TagMeasurement]) -> Result<()> {
        if let Some(previous) = self.latest {
            if now <= previous {
                return Err(Error::OutOfOrder { previous, got: now });
            }
            if let Some(m) = measurements.iter().find(|m| m.timestamp <= previous) {
                return Err(Error::OutOfOrder {
                    previous,
                    got: m.timestamp,
                });
            }
        }
        if let Some(m) = measurements.iter().find(|m| m.timestamp > now) {
            return Err(Error::OutOfOrder {
                previous: m.timestamp,
                got: now,
            });
        }
        for m in measurements {
            let buf = self.buffers.entry(m.anchor_id).or_default();
            buf.push_back((m.timestamp, m.range_m));
            while buf.len() > self.config.window {
                buf.pop_front();
            }
        }
        let expiry = self.config.expiry_s;
        self.buffers
            .retain(|_, buf| buf.back().is_some_and(|&(t, _)| now - t <= expiry));
        self.latest = Some(now);
        Ok(())
    }

    pub fn len(&self, anchor_id: u32) -> usize {
        self.buffers.get(&anchor_id).map_or(0, VecDeque::len)
    }

    pub fn contains(&self, anchor_id: u32) -> bool {
        self.buffers.contains_key(&anchor_id)
    }

    pub fn ranges(&self, anchor_id: u32) -> impl Iterator<Item = f64> + '_ {
        self.buffers.get(&anchor_id).into_iter().flatten().map(|&(_, r)| r)
    }

    /// Unbiased variance of the windowed ranges, once `min_samples` exist.
    pub fn variance(&self, anchor_id: u32) -> Option<f64> {
        let buf = self.buffers.get(&anchor_id)?;
        if buf.len() < self.config.min_samples.max(2) {
            return None;
        }
        // Welford
        let (mut mean, mut m2) = (0.0, 0.0);
        for (i, &(_, r)) in buf.iter().enumerate() {
            let delta = r - mean;
            mean += delta / (i + 1) as f64;
            m2 += delta * (r - mean);
        }
        Some(m2 / (buf.len() - 1) as f64)
    }
}

fn by_id(a: &TagMeasurement, b: &TagMeasurement) -> Ordering {
    a.anchor_id.cmp(&b.anchor_id)
}

/// Chooses the measurements fed to the position solver.
///
/// Output is ordered by selection key, ties broken by ascending anchor id.
/// `rss` must be supplied for [`SelectionKind::Strongest`].
pub fn select(
    measurements: &[TagMeasurement],
    history: &RangeHistory,
    policy: &SelectionPolicy,
    rss: Option<&BTreeMap<u32, f64>>,
) -> Result<Vec<TagMeasurement>> {
    let mut out = measurements.to_vec();
    match policy.kind {
        SelectionKind::All => {
            out.sort_by(by_id);
            return Ok(out);
        }
        SelectionKind::Nearest => {
            out.sort_by(|a, b| a.range_m.total_cmp(&b.range_m).then_with(|| by_id(a, b)));
        }
        SelectionKind::Farthest => {
            out.sort_by(|a, b| b.range_m.total_cmp(&a.range_m).then_with(|| by_id(a, b)));
        }
        SelectionKind::LeastVariance => {
            let keyed: Vec<(Option<f64>, TagMeasurement)> =
                out.iter().map(|m| (history.variance(m.anchor_id), *m)).collect();
            let mut keyed = keyed;
            keyed.sort_by(|(va, a), (vb, b)| {
                match (va, vb) {
                    (Some(x), Some(y)) => x.total_cmp(y),
                    (Some(_), None) => Ordering::Less,
                    (None, Some(_)) => Ordering::Greater,
                    (None, None) => a.range_m.total_cmp(&b.range_m),
                }
                .then_with(|| by_id(a, b))
            });
            out = keyed.into_iter().map(|(_, m)| m).collect();
        }
        SelectionKind::Strongest => {
            let rss = rss.ok_or_else(|| Error::Config("the strongest policy needs signal strengths".into()))?;
            let strength = |m: &TagMeasurement| -> Result<f64> {
                rss.get(&m.anchor_id).copied().ok_or(Error::UnknownAnchor(m.anchor_id))
            };
            for m in &out {
                strength(m)?;
            }
            out.sort_by(|a, b| {
                let (sa, sb) = (rss[&a.anchor_id], rss[&b.anchor_id]);
                sb.total_cmp(&sa).then_with(|| by_id(a, b))
            });
        }
    }
    out.truncate(policy.k);
    Ok(out)
}
