//! Domain types and planar frame geometry.
//!
//! Frame convention: at heading 0 the device forward axis points along world
//! +x. Headings and bearings are counterclockwise-positive radians in
//! `[-π, π)`.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A 2D vector or point in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(radius: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(radius * c, radius * s)
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    /// Counterclockwise rotation by `angle` radians.
    pub fn rotated(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, other: Vec2, t: f64) -> Self {
        self + (other - self) * t
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Maps any finite angle into `[-π, π)`.
pub fn wrap_angle(angle: f64) -> f64 {
    let wrapped = (angle + PI).rem_euclid(TAU) - PI;
    // rem_euclid may round up to exactly TAU for tiny negative inputs
    if wrapped >= PI {
        wrapped - TAU
    } else {
        wrapped
    }
}

/// Signed smallest difference `a - b`, wrapped into `[-π, π)`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    wrap_angle(a - b)
}

pub fn euclidean_distance(a: Vec2, b: Vec2) -> f64 {
    (a - b).norm()
}

/// A fixed reference tag at a surveyed position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnchorTag {
    pub id: u32,
    pub position: Vec2,
}

impl AnchorTag {
    pub fn new(id: u32, x: f64, y: f64) -> Self {
        Self {
            id,
            position: Vec2::new(x, y),
        }
    }
}

/// User position and absolute heading at a point in time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vec2,
    pub heading: f64,
    pub timestamp: f64,
}

impl Pose {
    /// Builds a pose, normalizing the heading.
    pub fn new(position: Vec2, heading: f64, timestamp: f64) -> Self {
        Self {
            position,
            heading: wrap_angle(heading),
            timestamp,
        }
    }

    /// Maps a device-frame offset into world coordinates.
    pub fn relative_to_world(&self, offset: Vec2) -> Vec2 {
        self.position + offset.rotated(self.heading)
    }

    /// Inverse of [`Pose::relative_to_world`].
    pub fn world_to_relative(&self, point: Vec2) -> Vec2 {
        (point - self.position).rotated(-self.heading)
    }
}

/// One range/bearing observation of an anchor from the device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TagMeasurement {
    pub anchor_id: u32,
    /// Measured distance in meters, never negative.
    pub range_m: f64,
    /// Direction to the anchor relative to the device forward axis.
    pub bearing_rad: f64,
    pub timestamp: f64,
}

impl TagMeasurement {
    /// Offset of the anchor in the device frame.
    pub fn device_offset(&self) -> Vec2 {
        Vec2::from_polar(self.range_m, self.bearing_rad)
    }
}

/// Returns true when every point lies within `tolerance` meters of a single
/// line (or there are fewer than three points).
pub fn is_collinear(points: &[Vec2], tolerance: f64) -> bool {
    if points.len() < 3 {
        return true;
    }
    // farthest pair spans the candidate line
    let mut best = (0, 0, 0.0);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = (points[i] - points[j]).norm_squared();
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    if best.2 == 0.0 {
        return true;
    }
    let origin = points[best.0];
    let dir = points[best.1] - origin;
    let len = dir.norm();
    points.iter().all(|p| (dir.cross(*p - origin) / len).abs() <= tolerance)
}
