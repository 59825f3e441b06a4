//! Network topology, channel grids, junction polygons and triangular meshes.

pub mod builder;
pub mod channel;
pub mod junction;
pub mod mesh;
pub mod network;

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

pub use builder::{build_patch_mesh, build_reference_mesh};
pub use channel::{discretize_channel, ChannelGrid, EndTrim};
pub use junction::{build_junction_polygon, EdgeKind, JunctionArm, JunctionGeometry, PolygonEdge};
pub use mesh::{load_trimesh, parse_trimesh, BoundaryTag, MeshEdge, TriMesh};
pub use network::{Channel, ChannelEnd, ChannelNetwork, JunctionStrategy, Node, NodeKind, PatchSource};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn from_polar(r: f64, angle: f64) -> Self {
        Point { x: r * angle.cos(), y: r * angle.sin() }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Point {
        Point { x: -self.y, y: self.x }
    }

    pub fn rotated(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point { x: c * self.x - s * self.y, y: s * self.x + c * self.y }
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        self + (o - self) * t
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point { x: self.x + o.x, y: self.y + o.y }
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point { x: self.x - o.x, y: self.y - o.y }
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point { x: self.x * s, y: self.y * s }
    }
}

/// Signed shoelace area (positive for counter-clockwise order).
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut a = 0.0;
    for i in 0..n {
        a += poly[i].cross(poly[(i + 1) % n]);
    }
    0.5 * a
}

/// Area centroid of a simple polygon.
pub fn polygon_centroid(poly: &[Point]) -> Point {
    let n = poly.len();
    let a = signed_area(poly);
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let w = p.cross(q);
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    Point::new(cx / (6.0 * a), cy / (6.0 * a))
}

pub fn perimeter(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| poly[i].distance(poly[(i + 1) % n])).sum()
}

/// Even-odd point-in-polygon test; points on the boundary may go either way.
pub fn point_in_polygon(p: Point, poly: &[Point]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Proper intersection of segments `ab` and `cd` (shared endpoints excluded).
pub fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let eps = 1e-12 * (a.distance(b) + c.distance(d));
    let d1 = (b - a).cross(c - a);
    let d2 = (b - a).cross(d - a);
    let d3 = (d - c).cross(a - c);
    let d4 = (d - c).cross(b - c);
    ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))
}

/// True when no two non-adjacent edges of the closed polygon cross.
pub fn polygon_is_simple(poly: &[Point]) -> bool {
    let n = poly.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

/// Intersection of the lines `p + t d` and `q + s e`, if not parallel.
pub fn line_intersection(p: Point, d: Point, q: Point, e: Point) -> Option<Point> {
    let den = d.cross(e);
    if den.abs() <= 1e-12 * d.norm() * e.norm() {
        return None;
    }
    let t = (q - p).cross(e) / den;
    Some(p + d * t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_helpers() {
        let sq = [Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(2.0, 1.0), Point::new(0.0, 1.0)];
        assert_eq!(signed_area(&sq), 2.0);
        assert_eq!(polygon_centroid(&sq), Point::new(1.0, 0.5));
        assert_eq!(perimeter(&sq), 6.0);
        assert!(point_in_polygon(Point::new(1.5, 0.5), &sq));
        assert!(!point_in_polygon(Point::new(2.5, 0.5), &sq));
        assert!(polygon_is_simple(&sq));
        let bow = [Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        assert!(!polygon_is_simple(&bow));
    }

    #[test]
    fn line_intersection_cases() {
        let p = line_intersection(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, -1.0), Point::new(0.0, 1.0));
        assert_eq!(p, Some(Point::new(1.0, 0.0)));
        assert!(line_intersection(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0), Point::new(2.0, 0.0)).is_none());
    }
}
