//! Error metrics and parameter sweeps.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multilateration::{run_trajectory, FixMethod, TrackPoint};
use crate::selector::{SelectionKind, SelectionPolicy};
use crate::sim::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSample {
    pub timestamp: f64,
    pub error_m: f64,
    pub method: FixMethod,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ErrorSeries {
    pub samples: Vec<ErrorSample>,
}

impl ErrorSeries {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.error_m).collect()
    }
}

pub fn compute_errors(points: &[TrackPoint]) -> Result<ErrorSeries> {
    if points.is_empty() {
        return Err(Error::Empty("trajectory"));
    }
    let samples = points
        .iter()
        .map(|p| ErrorSample {
            timestamp: p.truth.timestamp,
            error_m: (p.fix.position - p.truth.position).norm(),
            method: p.fix.method,
        })
        .collect();
    Ok(ErrorSeries { samples })
}

fn sorted(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::Empty("error series"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("error series"));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Empirical CDF: ascending values paired with `i / n`.
pub fn cdf(values: &[f64]) -> Result<Vec<(f64, f64)>> {
    let v = sorted(values)?;
    let n = v.len();
    Ok(v.into_iter()
        .enumerate()
        .map(|(i, x)| (x, if i + 1 == n { 1.0 } else { (i + 1) as f64 / n as f64 }))
        .collect())
}

/// Reads the value at cumulative fraction `q` off an empirical CDF.
///
/// Where `q` lands exactly on a step the two adjacent values are averaged.
pub fn cdf_value_at(curve: &[(f64, f64)], q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::QuantileOutOfRange(q));
    }
    let first = curve.first().ok_or(Error::Empty("cdf"))?;
    if q == 0.0 {
        return Ok(first.0);
    }
    let i = curve.partition_point(|&(_, f)| f < q);
    let (x, f) = curve[i.min(curve.len() - 1)];
    match curve.get(i + 1) {
        Some(&(next, _)) if f == q => Ok(0.5 * (x + next)),
        _ => Ok(x),
    }
}

/// Linearly interpolated empirical quantile.
pub fn percentile(values: &[f64], q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::QuantileOutOfRange(q));
    }
    let v = sorted(values)?;
    Ok(percentile_sorted(&v, q))
}

fn percentile_sorted(v: &[f64], q: f64) -> f64 {
    let h = (v.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub median_m: f64,
    pub p90_m: f64,
    pub mean_m: f64,
    pub n_poses: usize,
}

pub fn summarize(values: &[f64]) -> Result<Summary> {
    let v = sorted(values)?;
    Ok(Summary {
        median_m: percentile_sorted(&v, 0.5),
        p90_m: percentile_sorted(&v, 0.9),
        mean_m: v.iter().sum::<f64>() / v.len() as f64,
        n_poses: v.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    Selection,
    K,
    Density,
    Sigma,
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::Selection => "selection",
            SweepAxis::K => "k",
            SweepAxis::Density => "density",
            SweepAxis::Sigma => "sigma",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "selection" => Ok(SweepAxis::Selection),
            "k" => Ok(SweepAxis::K),
            "density" => Ok(SweepAxis::Density),
            "sigma" => Ok(SweepAxis::Sigma),
            other => Err(Error::Config(format!(
                "unknown sweep axis '{other}' (expected selection, k, density or sigma)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepValue {
    Selection(SelectionKind),
    K(usize),
    Density(usize),
    Sigma(f64),
}

impl fmt::Display for SweepValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepValue::Selection(kind) => write!(f, "{kind}"),
            SweepValue::K(k) | SweepValue::Density(k) => write!(f, "{k}"),
            SweepValue::Sigma(s) => write!(f, "{s}"),
        }
    }
}

fn parse_count(token: &str) -> Result<usize> {
    token
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("'{token}' is not a non-negative integer")))
}

/// Parses a comma list, or `a..b` (inclusive) for integer axes.
pub fn parse_sweep_values(axis: SweepAxis, text: &str) -> Result<Vec<SweepValue>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Config("no sweep values given".into()));
    }
    let integer_axis = matches!(axis, SweepAxis::K | SweepAxis::Density);
    if let (true, Some((a, b))) = (integer_axis, text.split_once("..")) {
        let (a, b) = (parse_count(a)?, parse_count(b)?);
        if a > b {
            return Err(Error::Config(format!("empty range {text}")));
        }
        return Ok((a..=b)
            .map(|n| {
                if axis == SweepAxis::K {
                    SweepValue::K(n)
                } else {
                    SweepValue::Density(n)
                }
            })
            .collect());
    }
    text.split(',')
        .map(|token| {
            let token = token.trim();
            Ok(match axis {
                SweepAxis::Selection => SweepValue::Selection(token.parse()?),
                SweepAxis::K => SweepValue::K(parse_count(token)?),
                SweepAxis::Density => SweepValue::Density(parse_count(token)?),
                SweepAxis::Sigma => SweepValue::Sigma(
                    token
                        .parse()
                        .map_err(|_| Error::Config(format!("'{token}' is not a number")))?,
                ),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: String,
    pub median_m: f64,
    pub p90_m: f64,
    pub mean_m: f64,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub replications: usize,
    /// Policy for axes that do not set it themselves.
    pub policy: SelectionPolicy,
    /// Worker count; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            replications: 1,
            policy: SelectionPolicy::default(),
            threads: None,
        }
    }
}

fn check_value(scenario: &Scenario, value: &SweepValue) -> Result<()> {
    match *value {
        SweepValue::K(0) => Err(Error::Config("k must be at least 1".into())),
        SweepValue::Density(n) if n == 0 || n > scenario.anchors.len() => Err(Error::Config(format!(
            "density {n} outside 1..={}",
            scenario.anchors.len()
        ))),
        SweepValue::Sigma(s) if !(s.is_finite() && s >= 0.0) => {
            Err(Error::Config(format!("sigma must be finite and >= 0, got {s}")))
        }
        _ => Ok(()),
    }
}

/// Scenario and policy for one cell of a sweep.
pub fn sweep_cell(
    scenario: &Scenario,
    value: &SweepValue,
    replication: usize,
    policy: SelectionPolicy,
) -> Result<(Scenario, SelectionPolicy)> {
    check_value(scenario, value)?;
    let mut s = match *value {
        SweepValue::Density(n) => scenario.with_anchor_prefix(n),
        _ => scenario.clone(),
    };
    s.seed = scenario.seed.wrapping_add(replication as u64);
    let mut policy = policy;
    match *value {
        SweepValue::Selection(kind) => policy.kind = kind,
        SweepValue::K(k) => policy.k = k,
        SweepValue::Sigma(sigma) => {
            s.noise.range_sigma_los_m = sigma;
            s.noise.range_sigma_nlos_m = s.noise.range_sigma_nlos_m.max(sigma);
        }
        SweepValue::Density(_) => {}
    }
    Ok((s, policy))
}

/// Errors of one cell, after indoor activation.
pub fn run_cell(
    scenario: &Scenario,
    value: &SweepValue,
    replication: usize,
    policy: SelectionPolicy,
) -> Result<Vec<f64>> {
    let (s, policy) = sweep_cell(scenario, value, replication, policy)?;
    let run = run_trajectory(&s, policy)?;
    Ok(compute_errors(&run.points)?.errors())
}

/// Runs every (value, replication) cell and aggregates per value.
///
/// Errors from all replications of a value are pooled before taking
/// statistics. All values are checked before anything runs.
pub fn sweep(scenario: &Scenario, values: &[SweepValue], config: &SweepConfig) -> Result<Vec<SweepRow>> {
    if config.replications == 0 {
        return Err(Error::Config("replications must be at least 1".into()));
    }
    if values.is_empty() {
        return Err(Error::Config("no sweep values given".into()));
    }
    scenario.validate()?;
    for v in values {
        check_value(scenario, v)?;
    }
    let cells: Vec<(usize, usize)> = (0..values.len())
        .flat_map(|v| (0..config.replications).map(move |r| (v, r)))
        .collect();
    let work = || -> Result<Vec<Vec<f64>>> {
        cells
            .par_iter()
            .map(|&(v, r)| run_cell(scenario, &values[v], r, config.policy))
            .collect()
    };
    let results = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };

    let mut rows = Vec::with_capacity(values.len());
    for (v, chunk) in values.iter().zip(results.chunks(config.replications)) {
        let pooled: Vec<f64> = chunk.iter().flatten().copied().collect();
        let s = summarize(&pooled)?;
        rows.push(SweepRow {
            axis_value: v.to_string(),
            median_m: s.median_m,
            p90_m: s.p90_m,
            mean_m: s.mean_m,
        });
    }
    Ok(rows)
}
