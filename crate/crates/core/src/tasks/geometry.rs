//! Planar segment helpers for the maze simulator.

use serde::{Deserialize, Serialize};

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub const fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        Self {
            a: [x1, y1],
            b: [x2, y2],
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.a[0], self.a[1], self.b[0], self.b[1]]
    }

    /// Squared distance from `p` to the closest point of the segment.
    pub fn distance_sq(&self, p: Point) -> f64 {
        let d = sub(self.b, self.a);
        let len_sq = dot(d, d);
        let t = if len_sq == 0.0 {
            0.0
        } else {
            (dot(sub(p, self.a), d) / len_sq).clamp(0.0, 1.0)
        };
        let c = [self.a[0] + t * d[0], self.a[1] + t * d[1]];
        let e = sub(p, c);
        dot(e, e)
    }
}

fn sub(p: Point, q: Point) -> Point {
    [p[0] - q[0], p[1] - q[1]]
}

fn dot(p: Point, q: Point) -> f64 {
    p[0] * q[0] + p[1] * q[1]
}

fn cross(p: Point, q: Point) -> f64 {
    p[0] * q[1] - p[1] * q[0]
}

fn orient(p: Point, q: Point, r: Point) -> f64 {
    cross(sub(q, p), sub(r, p))
}

fn on_segment(p: Point, q: Point, r: Point) -> bool {
    r[0] >= p[0].min(q[0]) && r[0] <= p[0].max(q[0]) && r[1] >= p[1].min(q[1]) && r[1] <= p[1].max(q[1])
}

/// Closed-segment intersection test: touching endpoints count.
pub fn segments_intersect(p1: Point, p2: Point, s: &Segment) -> bool {
    let (q1, q2) = (s.a, s.b);
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);

    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// Distance along the unit ray `origin + t * dir` to the segment, if hit.
pub fn ray_distance(origin: Point, dir: Point, s: &Segment) -> Option<f64> {
    let e = sub(s.b, s.a);
    let denom = cross(dir, e);
    if denom.abs() < 1e-15 {
        return None;
    }
    let w = sub(s.a, origin);
    let (tn, un) = (cross(w, e), cross(w, dir));
    // sign tests first; divide only on a hit
    let hit = if denom > 0.0 {
        tn >= 0.0 && un >= 0.0 && un <= denom
    } else {
        tn <= 0.0 && un <= 0.0 && un >= denom
    };
    hit.then(|| tn / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_and_disjoint_segments() {
        let wall = Segment::new(0.5, 0.0, 0.5, 1.0);
        assert!(segments_intersect([0.4, 0.5], [0.6, 0.5], &wall));
        assert!(!segments_intersect([0.1, 0.5], [0.4, 0.5], &wall));
        // touching counts
        assert!(segments_intersect([0.4, 0.5], [0.5, 0.5], &wall));
        // collinear overlap
        assert!(segments_intersect([0.5, 0.2], [0.5, 0.3], &wall));
        assert!(!segments_intersect([0.5, 1.2], [0.5, 1.3], &wall));
    }

    #[test]
    fn ray_hits_wall_ahead() {
        let wall = Segment::new(0.6, 0.0, 0.6, 1.0);
        let d = ray_distance([0.5, 0.5], [1.0, 0.0], &wall).unwrap();
        assert!((d - 0.1).abs() < 1e-12);
        assert!(ray_distance([0.5, 0.5], [-1.0, 0.0], &wall).is_none());
        assert!(ray_distance([0.5, 0.5], [0.0, 1.0], &wall).is_none());
    }

    #[test]
    fn point_segment_distance() {
        let s = Segment::new(0.0, 0.0, 1.0, 0.0);
        assert!((s.distance_sq([0.5, 0.2]) - 0.04).abs() < 1e-12);
        assert!((s.distance_sq([2.0, 0.0]) - 1.0).abs() < 1e-12);
    }
}
