use crate::model::Vec2;

use super::scenario::Segment;

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

fn within_box(p: Vec2, a: Vec2, b: Vec2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test; touching and collinear overlap count.
pub fn segments_intersect(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);

    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && within_box(p1, q1, q2))
        || (d2 == 0.0 && within_box(p2, q1, q2))
        || (d3 == 0.0 && within_box(q1, p1, p2))
        || (d4 == 0.0 && within_box(q2, p1, p2))
}

/// True when the straight path between `a` and `b` crosses no wall.
/// Touching a wall counts as blocked.
pub fn is_los(a: Vec2, b: Vec2, walls: &[Segment]) -> bool {
    // canonical endpoint order keeps the rounding identical for (a, b) and (b, a)
    let (a, b) = if (a.x, a.y) <= (b.x, b.y) { (a, b) } else { (b, a) };
    !walls.iter().any(|w| segments_intersect(a, b, w.a, w.b))
}
