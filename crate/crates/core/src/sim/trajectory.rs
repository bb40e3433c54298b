use crate::error::{Error, Result};
use crate::model::{Pose, Vec2};

use super::scenario::Scenario;

#[derive(Debug, Clone, Copy)]
struct Leg {
    from: Vec2,
    to: Vec2,
    heading: f64,
    start: f64,
    end: f64,
}

impl Leg {
    fn position_at(&self, t: f64) -> Vec2 {
        if self.end <= self.start {
            return self.to;
        }
        let frac = ((t - self.start) / (self.end - self.start)).clamp(0.0, 1.0);
        self.from.lerp(self.to, frac)
    }
}

/// Piecewise timeline of dwell and motion legs.
fn build_legs(scenario: &Scenario) -> Result<Vec<Leg>> {
    let wps = &scenario.waypoints;
    if wps.len() < 2 {
        return Err(Error::InvalidScenario("at least two waypoints are required".into()));
    }
    for pair in wps.windows(2) {
        if pair[0].position == pair[1].position && pair[1].dwell_s == 0.0 {
            return Err(Error::InvalidScenario(
                "consecutive waypoints coincide with zero dwell".into(),
            ));
        }
    }
    let first_heading = wps
        .windows(2)
        .map(|p| p[1].position - p[0].position)
        .find(|d| d.norm() > 0.0)
        .map(Vec2::angle)
        .unwrap_or(0.0);

    let mut legs = Vec::new();
    let mut t = 0.0;
    let mut heading = first_heading;
    for (i, wp) in wps.iter().enumerate() {
        if i > 0 {
            let from = wps[i - 1].position;
            let delta = wp.position - from;
            let length = delta.norm();
            if length > 0.0 {
                heading = delta.angle();
                let end = t + length / scenario.speed_mps;
                legs.push(Leg {
                    from,
                    to: wp.position,
                    heading,
                    start: t,
                    end,
                });
                t = end;
            }
        }
        if wp.dwell_s > 0.0 {
            let end = t + wp.dwell_s;
            legs.push(Leg {
                from: wp.position,
                to: wp.position,
                heading,
                start: t,
                end,
            });
            t = end;
        }
    }
    Ok(legs)
}

/// Ground-truth poses sampled at `sample_hz` along the waypoint path.
///
/// Heading follows the direction of motion; while dwelling it keeps the last
/// motion heading (or the first one, when dwelling at the start).
pub fn generate_trajectory(scenario: &Scenario) -> Result<Vec<Pose>> {
    if !(scenario.speed_mps > 0.0 && scenario.sample_hz > 0.0) {
        return Err(Error::InvalidScenario("speed and sample rate must be positive".into()));
    }
    let legs = build_legs(scenario)?;
    let total = legs.last().map(|l| l.end).unwrap_or(0.0);
    let count = (total * scenario.sample_hz + 1e-9).floor() as usize + 1;

    let mut poses = Vec::with_capacity(count);
    let mut leg_idx = 0;
    for i in 0..count {
        let t = i as f64 / scenario.sample_hz;
        while leg_idx + 1 < legs.len() && t >= legs[leg_idx].end {
            leg_idx += 1;
        }
        let pose = match legs.get(leg_idx) {
            Some(leg) => Pose::new(leg.position_at(t), leg.heading, t),
            None => Pose::new(scenario.waypoints[0].position, 0.0, t),
        };
        poses.push(pose);
    }
    Ok(poses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::builtin;
    use crate::sim::scenario::Waypoint;
    use std::f64::consts::FRAC_PI_2;

    fn scenario(points: &[(f64, f64, f64)], speed: f64, hz: f64) -> Scenario {
        let mut s = builtin::campus();
        s.waypoints = points
            .iter()
            .map(|&(x, y, dwell_s)| Waypoint {
                position: Vec2::new(x, y),
                dwell_s,
            })
            .collect();
        s.speed_mps = speed;
        s.sample_hz = hz;
        s
    }

    #[test]
    fn straight_line() {
        let poses = generate_trajectory(&scenario(&[(0.0, 0.0, 0.0), (10.0, 0.0, 0.0)], 1.0, 1.0)).unwrap();
        assert_eq!(poses.len(), 11);
        for (i, p) in poses.iter().enumerate() {
            assert!((p.position.x - i as f64).abs() < 1e-12);
            assert_eq!(p.position.y, 0.0);
            assert_eq!(p.heading, 0.0);
            assert_eq!(p.timestamp, i as f64);
        }
    }

    #[test]
    fn axis_aligned_heading() {
        let poses = generate_trajectory(&scenario(&[(0.0, 0.0, 0.0), (0.0, 5.0, 0.0)], 1.0, 1.0)).unwrap();
        assert!(poses.iter().all(|p| (p.heading - FRAC_PI_2).abs() < 1e-15));
    }

    #[test]
    fn closed_square_loop() {
        let pts = [
            (0.0, 0.0, 0.0),
            (4.0, 0.0, 0.0),
            (4.0, 4.0, 0.0),
            (0.0, 4.0, 0.0),
            (0.0, 0.0, 0.0),
        ];
        let poses = generate_trajectory(&scenario(&pts, 1.0, 1.0)).unwrap();
        assert_eq!(poses.len(), 17);
        let last = poses.last().unwrap();
        assert!(last.position.norm() < 1e-12);
        assert!(poses.windows(2).all(|w| w[1].timestamp > w[0].timestamp));
    }

    #[test]
    fn dwell_repeats_position_and_heading() {
        let poses = generate_trajectory(&scenario(
            &[(0.0, 0.0, 2.0), (0.0, 3.0, 2.0), (3.0, 3.0, 0.0)],
            1.0,
            1.0,
        ))
        .unwrap();
        // 2 s dwell, 3 s up, 2 s dwell, 3 s right
        assert_eq!(poses.len(), 11);
        assert_eq!(poses[0].position, poses[2].position);
        assert!((poses[0].heading - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(poses[5].position, poses[7].position);
        assert!((poses[6].heading - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(poses[8].heading, 0.0);
    }

    #[test]
    fn rejects_coincident_waypoints_without_dwell() {
        let s = scenario(&[(1.0, 1.0, 0.0), (1.0, 1.0, 0.0), (2.0, 1.0, 0.0)], 1.0, 1.0);
        assert!(generate_trajectory(&s).is_err());
        let ok = scenario(&[(1.0, 1.0, 0.0), (1.0, 1.0, 1.0), (2.0, 1.0, 0.0)], 1.0, 1.0);
        assert!(generate_trajectory(&ok).is_ok());
    }
}
