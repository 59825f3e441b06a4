use std::f64::consts::{PI, TAU};

use super::network::ChannelEnd;
use super::{line_intersection, perimeter, polygon_centroid, polygon_is_simple, signed_area, Point};
use crate::error::{Error, Result};

/// One channel end attached to a junction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JunctionArm {
    pub channel: usize,
    pub end: ChannelEnd,
    pub width: f64,
    /// Direction from the junction point into the channel.
    pub angle: f64,
}

impl JunctionArm {
    pub fn direction(&self) -> Point {
        Point::from_polar(1.0, self.angle)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    /// Index into `JunctionGeometry::arms`.
    Coupling(usize),
    Wall,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolygonEdge {
    pub a: Point,
    pub b: Point,
    pub length: f64,
    /// Angle of the outward normal.
    pub theta: f64,
    pub kind: EdgeKind,
}

impl PolygonEdge {
    pub fn midpoint(&self) -> Point {
        self.a.lerp(self.b, 0.5)
    }
}

/// The junction-shaped polygon and how it connects to its channels.
#[derive(Clone, Debug, PartialEq)]
pub struct JunctionGeometry {
    pub center: Point,
    /// Counter-clockwise vertices.
    pub vertices: Vec<Point>,
    pub edges: Vec<PolygonEdge>,
    pub area: f64,
    pub centroid: Point,
    pub arms: Vec<JunctionArm>,
    /// Distance from the junction point to the channel mouth, per arm.
    pub mouth_offsets: Vec<f64>,
    /// Distance from the junction point to the coupling edge, per arm.
    pub coupling_offsets: Vec<f64>,
    /// Index of each arm's coupling edge in `edges`.
    pub coupling_edges: Vec<usize>,
}

impl JunctionGeometry {
    /// `4 A / P`: the incircle diameter for a triangle, used as the CFL length.
    pub fn cfl_length(&self) -> f64 {
        4.0 * self.area / perimeter(&self.vertices)
    }
}

fn norm_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU { 0.0 } else { r }
}

/// Build the single junction-shaped element.
///
/// Side walls of angularly adjacent arms are extended until they meet; the
/// coupling edge of each arm sits `protrusion * width` beyond the point where
/// the arm's walls leave the junction core.
pub fn build_junction_polygon(center: Point, arms: &[JunctionArm], protrusion: f64) -> Result<JunctionGeometry> {
    if arms.len() < 2 {
        return Err(Error::DegenerateGeometry(format!("junction needs at least 2 arms, got {}", arms.len())));
    }
    let n = arms.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norm_angle(arms[a].angle).total_cmp(&norm_angle(arms[b].angle)));
    let max_width = arms.iter().map(|a| a.width).fold(0.0, f64::max);
    let angle_tol = 1e-9;

    // Wall vertices between sorted arm k and sorted arm k+1.
    let mut walls: Vec<Vec<Point>> = Vec::with_capacity(n);
    for k in 0..n {
        let a = &arms[order[k]];
        let b = &arms[order[(k + 1) % n]];
        let mut gap = norm_angle(b.angle) - norm_angle(a.angle);
        if k == n - 1 {
            gap += TAU;
        }
        if gap <= angle_tol {
            return Err(Error::DegenerateGeometry("two arms share the same direction".into()));
        }
        let (da, db) = (a.direction(), b.direction());
        let left_a = center + da.perp() * (0.5 * a.width);
        let right_b = center - db.perp() * (0.5 * b.width);
        if (gap - PI).abs() <= angle_tol {
            // straight walls, with a step at the junction point if the widths differ
            if (a.width - b.width).abs() <= 1e-12 * max_width {
                walls.push(vec![]);
            } else {
                walls.push(vec![left_a, right_b]);
            }
            continue;
        }
        let p = line_intersection(left_a, da, right_b, db)
            .ok_or_else(|| Error::DegenerateGeometry("adjacent side walls are parallel".into()))?;
        if gap > PI && p.distance(center) > max_width {
            walls.push(vec![center]);
        } else {
            walls.push(vec![p]);
        }
    }

    let mut mouth = vec![0.0; n];
    for k in 0..n {
        let arm = &arms[order[k]];
        let d = arm.direction();
        let mut m: f64 = 0.0;
        for w in walls[(k + n - 1) % n].iter().chain(&walls[k]) {
            m = m.max((*w - center).dot(d));
        }
        mouth[order[k]] = m;
    }
    let coupling: Vec<f64> = (0..n).map(|i| mouth[i] + protrusion * arms[i].width).collect();

    let mut vertices = Vec::new();
    let mut kinds = Vec::new();
    for k in 0..n {
        let i = order[k];
        let arm = &arms[i];
        let d = arm.direction();
        let l = d.perp() * (0.5 * arm.width);
        let base = center + d * coupling[i];
        vertices.push(base - l);
        kinds.push(EdgeKind::Coupling(i));
        vertices.push(base + l);
        kinds.push(EdgeKind::Wall);
        for &w in &walls[k] {
            vertices.push(w);
            kinds.push(EdgeKind::Wall);
        }
    }

    let area = signed_area(&vertices);
    if !(area > 0.0) {
        return Err(Error::DegenerateGeometry(format!("junction polygon has non-positive area {area}")));
    }
    if !polygon_is_simple(&vertices) {
        return Err(Error::DegenerateGeometry("junction polygon self-intersects".into()));
    }
    let centroid = polygon_centroid(&vertices);
    let nv = vertices.len();
    let mut edges = Vec::with_capacity(nv);
    let mut coupling_edges = vec![0; n];
    for j in 0..nv {
        let a = vertices[j];
        let b = vertices[(j + 1) % nv];
        let t = b - a;
        let theta = (-t.x).atan2(t.y);
        let mut length = t.norm();
        if let EdgeKind::Coupling(i) = kinds[j] {
            length = arms[i].width;
            coupling_edges[i] = j;
        }
        if length <= 1e-14 * max_width {
            return Err(Error::DegenerateGeometry("zero-length polygon edge".into()));
        }
        let e = PolygonEdge { a, b, length, theta, kind: kinds[j] };
        let outward = Point::from_polar(1.0, theta);
        if outward.dot(e.midpoint() - centroid) <= 0.0 {
            return Err(Error::DegenerateGeometry(format!("edge {j} normal does not point outward")));
        }
        edges.push(e);
    }

    Ok(JunctionGeometry {
        center,
        vertices,
        edges,
        area,
        centroid,
        arms: arms.to_vec(),
        mouth_offsets: mouth,
        coupling_offsets: coupling,
        coupling_edges,
    })
}
