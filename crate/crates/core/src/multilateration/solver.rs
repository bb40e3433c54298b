//! Weighted range-only position solving.
//!
//! Minimizes `Σ w_i (‖p − a_i‖ − d_i)²` by damped Gauss-Newton, started from
//! the closed-form solution of the circle equations linearized by
//! subtracting the first one from the rest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FixMethod {
    Multilateration,
    OneShot,
    DeadReckoned,
}

impl FixMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            FixMethod::Multilateration => "MULTILATERATION",
            FixMethod::OneShot => "ONE_SHOT",
            FixMethod::DeadReckoned => "DEAD_RECKONED",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixResult {
    pub position: Vec2,
    pub residual_rms_m: f64,
    pub anchors_used: Vec<u32>,
    pub method: FixMethod,
    /// False when the normal equations were badly conditioned.
    pub condition_ok: bool,
}

/// One anchor's contribution to the solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeObservation {
    pub anchor_id: u32,
    pub position: Vec2,
    pub range_m: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    pub step_tolerance_m: f64,
    pub max_halvings: usize,
    pub max_condition: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 50,
            step_tolerance_m: 1e-9,
            max_halvings: 10,
            max_condition: 1e8,
        }
    }
}

/// Symmetric 2x2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Debug, Clone, Copy, Default)]
struct Sym2 {
    xx: f64,
    xy: f64,
    yy: f64,
}

impl Sym2 {
    fn add_outer(&mut self, u: Vec2, w: f64) {
        self.xx += w * u.x * u.x;
        self.xy += w * u.x * u.y;
        self.yy += w * u.y * u.y;
    }

    /// Eigenvalues (descending) and the unit eigenvector of the larger one.
    fn eigen(&self) -> (f64, f64, Vec2) {
        let mean = 0.5 * (self.xx + self.yy);
        let half_diff = 0.5 * (self.xx - self.yy);
        let radius = half_diff.hypot(self.xy);
        let (hi, lo) = (mean + radius, mean - radius);
        let v = if radius == 0.0 {
            Vec2::new(1.0, 0.0)
        } else if half_diff >= 0.0 {
            Vec2::new(half_diff + radius, self.xy)
        } else {
            Vec2::new(self.xy, radius - half_diff)
        };
        (hi, lo, v * (1.0 / v.norm()))
    }

    fn condition(&self) -> f64 {
        let (hi, lo, _) = self.eigen();
        if lo <= 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    /// Pseudo-inverse solve, dropping directions below `rcond` of the
    /// largest eigenvalue.
    fn solve(&self, rhs: Vec2, rcond: f64) -> Option<Vec2> {
        let (hi, lo, v1) = self.eigen();
        if hi.is_nan() || hi <= 0.0 {
            return None;
        }
        let v2 = Vec2::new(-v1.y, v1.x);
        let mut out = v1 * (v1.dot(rhs) / hi);
        if lo > rcond * hi {
            out = out + v2 * (v2.dot(rhs) / lo);
        }
        Some(out)
    }
}

/// Closed-form starting point from the pairwise-subtracted circle equations.
pub fn linear_init(anchors: &[(Vec2, f64)]) -> Result<Vec2> {
    if anchors.len() < 3 {
        return Err(Error::InsufficientAnchors {
            needed: 3,
            got: anchors.len(),
        });
    }
    if anchors.iter().any(|(p, d)| !p.is_finite() || !d.is_finite()) {
        return Err(Error::NonFinite("anchor position or range"));
    }
    // Work relative to the first anchor to limit cancellation:
    //   2 q_i · p' = d_1² − d_i² + ‖q_i‖²,  q_i = a_i − a_1,  p' = p − a_1
    let (origin, d1) = anchors[0];
    let mut normal = Sym2::default();
    let mut rhs = Vec2::ZERO;
    for &(a, d) in &anchors[1..] {
        let q = a - origin;
        let row = q * 2.0;
        let b = d1 * d1 - d * d + q.norm_squared();
        normal.add_outer(row, 1.0);
        rhs = rhs + row * b;
    }
    let (hi, lo, _) = normal.eigen();
    if hi.is_nan() || hi <= 0.0 || lo <= 1e-12 * hi {
        return Err(Error::DegenerateGeometry("anchors are collinear".into()));
    }
    let p = normal
        .solve(rhs, 0.0)
        .ok_or_else(|| Error::DegenerateGeometry("singular system".into()))?;
    Ok(origin + p)
}

pub fn weighted_cost(obs: &[RangeObservation], p: Vec2) -> f64 {
    obs.iter()
        .map(|o| {
            let r = (p - o.position).norm() - o.range_m;
            o.weight * r * r
        })
        .sum()
}

/// Bound on the floating-point error of [`weighted_cost`] at `p`. Cost
/// increases below it are treated as no increase.
fn cost_rounding(obs: &[RangeObservation], p: Vec2) -> f64 {
    let slack: f64 = obs
        .iter()
        .map(|o| {
            let dist = (p - o.position).norm();
            let r = dist - o.range_m;
            o.weight * (r.abs() * (dist + o.range_m + o.position.norm() + p.norm()) + r * r)
        })
        .sum();
    16.0 * f64::EPSILON * slack
}

fn validate(obs: &[RangeObservation], init: Vec2) -> Result<()> {
    if obs.len() < 3 {
        return Err(Error::InsufficientAnchors {
            needed: 3,
            got: obs.len(),
        });
    }
    if !init.is_finite() {
        return Err(Error::NonFinite("initial position"));
    }
    for o in obs {
        if !o.position.is_finite() {
            return Err(Error::NonFinite("anchor position"));
        }
        if !(o.range_m.is_finite() && o.range_m >= 0.0) {
            return Err(Error::NonFinite("range"));
        }
        if !(o.weight.is_finite() && o.weight > 0.0) {
            return Err(Error::Config(format!("weight must be positive, got {}", o.weight)));
        }
    }
    Ok(())
}

/// Gauss-Newton normal matrix `JᵀWJ` and gradient half `JᵀWr` at `p`.
fn normal_equations(obs: &[RangeObservation], p: Vec2) -> (Sym2, Vec2) {
    let mut h = Sym2::default();
    let mut g = Vec2::ZERO;
    for o in obs {
        let diff = p - o.position;
        let dist = diff.norm();
        // the range Jacobian is undefined at the anchor itself
        let u = if dist > 1e-12 { diff * (1.0 / dist) } else { Vec2::ZERO };
        h.add_outer(u, o.weight);
        g = g + u * (o.weight * (dist - o.range_m));
    }
    (h, g)
}

pub fn solve_fix(obs: &[RangeObservation], init: Vec2) -> Result<FixResult> {
    solve_fix_with(obs, init, &SolverConfig::default())
}

/// Damped Gauss-Newton from `init`.
///
/// When the anchors are not collinear a second descent is started from
/// [`linear_init`] and the lower-cost result is kept, so a start near a
/// mirror-image local minimum still reaches the global one.
pub fn solve_fix_with(obs: &[RangeObservation], init: Vec2, config: &SolverConfig) -> Result<FixResult> {
    validate(obs, init)?;

    let (mut p, mut cost) = descend(obs, init, config);
    let pairs: Vec<(Vec2, f64)> = obs.iter().map(|o| (o.position, o.range_m)).collect();
    if let Ok(start) = linear_init(&pairs) {
        let (q, c) = descend(obs, start, config);
        if c < cost * (1.0 - 1e-9) {
            (p, cost) = (q, c);
        }
    }

    let (h, _) = normal_equations(obs, p);
    let weight_sum: f64 = obs.iter().map(|o| o.weight).sum();
    Ok(FixResult {
        position: p,
        residual_rms_m: (cost / weight_sum).sqrt(),
        anchors_used: obs.iter().map(|o| o.anchor_id).collect(),
        method: FixMethod::Multilateration,
        condition_ok: h.condition() <= config.max_condition,
    })
}

fn descend(obs: &[RangeObservation], init: Vec2, config: &SolverConfig) -> (Vec2, f64) {
    let mut p = init;
    let mut cost = weighted_cost(obs, p);
    for _ in 0..config.max_iterations {
        let (h, g) = normal_equations(obs, p);
        let Some(mut step) = h.solve(-g, 1e-14) else {
            break;
        };
        let ceiling = cost + cost_rounding(obs, p);
        let mut accepted = None;
        for _ in 0..=config.max_halvings {
            let candidate = p + step;
            let c = weighted_cost(obs, candidate);
            if c <= ceiling {
                accepted = Some((candidate, c));
                break;
            }
            step = step * 0.5;
        }
        let Some((candidate, c)) = accepted else {
            break;
        };
        p = candidate;
        cost = c;
        if step.norm() < config.step_tolerance_m {
            break;
        }
    }
    (p, cost)
}
