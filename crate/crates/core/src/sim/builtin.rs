//! Bundled reference scenarios.
//!
//! Both layouts are hand-drawn approximations of an office-building corridor
//! loop and a three-room apartment. Anchor ids are ordered so every id prefix
//! is spread across the floor, which keeps density sweeps meaningful.

use crate::detection::DetectorConfig;
use crate::model::{AnchorTag, Vec2};

use super::scenario::{IndoorInterval, NoiseModel, Scenario, Segment, Waypoint};

fn walls(segments: &[[f64; 4]]) -> Vec<Segment> {
    segments
        .iter()
        .map(|&[x1, y1, x2, y2]| Segment::new(Vec2::new(x1, y1), Vec2::new(x2, y2)))
        .collect()
}

fn waypoints(points: &[(f64, f64, f64)]) -> Vec<Waypoint> {
    points
        .iter()
        .map(|&(x, y, dwell_s)| Waypoint {
            position: Vec2::new(x, y),
            dwell_s,
        })
        .collect()
}

fn anchors(points: &[(f64, f64)]) -> Vec<AnchorTag> {
    points
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| AnchorTag::new(i as u32 + 1, x, y))
        .collect()
}

/// Open-plan office floor, 28 m x 20 m, entered through a door in the west
/// wall. The walk loops around a central cubicle block between rows of
/// storage cabinets. Anchors 1-6 are on the hall walls; 7-12 sit in the
/// east and north wings.
pub fn campus() -> Scenario {
    Scenario {
        name: "campus".into(),
        walls: walls(&[
            // hall, door gap at y in (9, 11) on the west side
            [0.0, 0.0, 28.0, 0.0],
            [28.0, 0.0, 28.0, 20.0],
            [28.0, 20.0, 0.0, 20.0],
            [0.0, 20.0, 0.0, 11.0],
            [0.0, 9.0, 0.0, 0.0],
            // east and north wings
            [28.0, 0.0, 36.0, 0.0],
            [36.0, 0.0, 36.0, 28.0],
            [36.0, 28.0, 0.0, 28.0],
            [0.0, 28.0, 0.0, 20.0],
            [28.0, 20.0, 36.0, 20.0],
            // cubicle block, open on the west at y in (10, 13)
            [8.0, 7.0, 20.0, 7.0],
            [8.0, 13.0, 20.0, 13.0],
            [8.0, 7.0, 8.0, 10.0],
            [20.0, 10.0, 20.0, 13.0],
            [14.0, 7.0, 14.0, 13.0],
            // storage rows
            [3.0, 3.0, 13.0, 3.0],
            [15.0, 3.0, 25.0, 3.0],
            [3.0, 17.0, 13.0, 17.0],
            [15.0, 17.0, 25.0, 17.0],
            [25.0, 4.0, 25.0, 16.0],
        ]),
        anchors: anchors(&[
            (0.5, 0.5),
            (27.5, 19.5),
            (27.5, 0.5),
            (0.5, 19.5),
            (14.0, 0.5),
            (14.0, 19.5),
            (34.0, 10.0),
            (14.0, 26.0),
            (34.0, 3.0),
            (3.0, 26.0),
            (34.0, 17.0),
            (25.0, 26.0),
        ]),
        waypoints: waypoints(&[
            (-6.0, 10.0, 4.0),
            (6.0, 10.0, 0.0),
            (6.0, 6.0, 0.0),
            (22.0, 6.0, 2.0),
            (22.0, 14.0, 0.0),
            (6.0, 14.0, 2.0),
            (6.0, 11.5, 0.0),
            (11.0, 11.5, 0.0),
        ]),
        speed_mps: 0.8,
        sample_hz: 10.0,
        noise: NoiseModel::default(),
        seed: 26,
        detector: DetectorConfig::default(),
        // the door is 6 m from the start, reached after the 4 s dwell
        indoor_interval: Some(IndoorInterval {
            start_s: 4.0 + 6.0 / 0.8,
            end_s: None,
        }),
    }
}

/// 14 m x 10 m apartment: a living room on the west, kitchen and bedroom on
/// the east, entered from the south. The 8 tags are kept in drawers and
/// cabinets, mostly in the living room, so none is in line of sight.
pub fn apartment() -> Scenario {
    let tags = [
        (0.3, 0.3),
        (7.7, 9.7),
        (7.7, 0.3),
        (0.3, 9.7),
        (4.0, 0.3),
        (4.0, 9.7),
        (0.3, 5.0),
        (8.5, 9.7),
    ];
    let mut segments = vec![
        // exterior, door gap at x in (1, 2) on the south side
        [0.0, 0.0, 1.0, 0.0],
        [2.0, 0.0, 14.0, 0.0],
        [14.0, 0.0, 14.0, 10.0],
        [14.0, 10.0, 0.0, 10.0],
        [0.0, 10.0, 0.0, 0.0],
        // living room / east rooms, door at y in (4.5, 5.5)
        [8.0, 0.0, 8.0, 4.5],
        [8.0, 5.5, 8.0, 10.0],
        // kitchen / bedroom, door at x in (9.5, 10.5)
        [8.0, 5.0, 9.5, 5.0],
        [10.5, 5.0, 14.0, 5.0],
        // sofa, kitchen counter, wardrobe
        [5.5, 6.5, 5.5, 9.0],
        [11.0, 1.5, 13.0, 1.5],
        [9.0, 6.5, 9.0, 9.0],
    ];
    const R: f64 = 0.25;
    for &(x, y) in &tags {
        segments.extend([
            [x - R, y - R, x + R, y - R],
            [x + R, y - R, x + R, y + R],
            [x + R, y + R, x - R, y + R],
            [x - R, y + R, x - R, y - R],
        ]);
    }
    Scenario {
        name: "apartment".into(),
        walls: walls(&segments),
        anchors: anchors(&tags),
        waypoints: waypoints(&[
            (1.5, -5.0, 4.0),
            (1.5, 1.0, 0.0),
            (3.5, 4.5, 0.0),
            (7.0, 4.5, 0.0),
            (10.0, 5.0, 0.0),
            (12.0, 3.0, 4.0),
            (10.0, 5.0, 0.0),
            (10.0, 6.0, 0.0),
            (12.0, 8.5, 4.0),
            (10.0, 6.0, 0.0),
            (7.0, 4.5, 0.0),
            (3.0, 8.0, 2.0),
            (1.5, 4.5, 0.0),
            (1.5, 2.0, 0.0),
        ]),
        speed_mps: 0.8,
        sample_hz: 10.0,
        noise: NoiseModel::default(),
        seed: 315,
        detector: DetectorConfig::default(),
        indoor_interval: Some(IndoorInterval {
            start_s: 4.0 + 5.0 / 0.8,
            end_s: None,
        }),
    }
}

pub fn by_name(name: &str) -> Option<Scenario> {
    match name {
        "campus" => Some(campus()),
        "apartment" => Some(apartment()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate() {
        for s in [campus(), apartment()] {
            let warnings = s.validate().unwrap();
            assert!(warnings.is_empty(), "{}: {warnings:?}", s.name);
        }
        assert!(by_name("campus").is_some());
        assert!(by_name("garage").is_none());
    }

    #[test]
    fn anchor_counts() {
        assert_eq!(campus().anchors.len(), 12);
        assert_eq!(apartment().anchors.len(), 8);
    }
}
