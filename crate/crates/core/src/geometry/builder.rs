//! Structured block meshing for junction patches and whole-network reference
//! meshes. Arms are quad blocks split into four triangles through the quad
//! centre; junction cores are filled with a refined constrained Delaunay
//! triangulation.
//! This is enough for the channel geometries handled here and is not a
//! general-purpose mesh generator.

use std::collections::{HashMap, HashSet};

use spade::{AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation};

use super::junction::{build_junction_polygon, EdgeKind, JunctionGeometry};
use super::mesh::{BoundaryTag, TriMesh};
use super::network::{ChannelEnd, ChannelNetwork, NodeKind};
use super::Point;
use crate::error::{Error, Result};

pub struct MeshBuilder {
    vertices: Vec<Point>,
    lookup: HashMap<(i64, i64), usize>,
    triangles: Vec<[usize; 3]>,
    tags: HashMap<(usize, usize), BoundaryTag>,
    quantum: f64,
}

impl MeshBuilder {
    /// `quantum` is the distance under which two vertices are merged.
    pub fn new(quantum: f64) -> Self {
        MeshBuilder { vertices: Vec::new(), lookup: HashMap::new(), triangles: Vec::new(), tags: HashMap::new(), quantum }
    }

    fn key(&self, p: Point) -> (i64, i64) {
        ((p.x / self.quantum).round() as i64, (p.y / self.quantum).round() as i64)
    }

    pub fn vertex(&mut self, p: Point) -> usize {
        let (kx, ky) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(&i) = self.lookup.get(&(kx + dx, ky + dy)) {
                    if self.vertices[i].distance(p) <= self.quantum {
                        return i;
                    }
                }
            }
        }
        self.vertices.push(p);
        let i = self.vertices.len() - 1;
        self.lookup.insert((kx, ky), i);
        i
    }

    /// Add a triangle, fixing its orientation to counter-clockwise.
    pub fn triangle(&mut self, a: Point, b: Point, c: Point) {
        let (ia, ib, ic) = (self.vertex(a), self.vertex(b), self.vertex(c));
        if ia == ib || ib == ic || ia == ic {
            return;
        }
        if (b - a).cross(c - a) > 0.0 {
            self.triangles.push([ia, ib, ic]);
        } else {
            self.triangles.push([ia, ic, ib]);
        }
    }

    /// Quad split into four triangles through its centre.
    pub fn quad(&mut self, p: [Point; 4]) {
        let m = Point::new(
            0.25 * (p[0].x + p[1].x + p[2].x + p[3].x),
            0.25 * (p[0].y + p[1].y + p[2].y + p[3].y),
        );
        for k in 0..4 {
            self.triangle(p[k], p[(k + 1) % 4], m);
        }
    }

    /// Tag the `n` sub-segments of the straight segment `a -> b`.
    pub fn tag_segment(&mut self, a: Point, b: Point, n: usize, tag: &BoundaryTag) {
        for i in 0..n {
            let p = self.vertex(a.lerp(b, i as f64 / n as f64));
            let q = self.vertex(a.lerp(b, (i + 1) as f64 / n as f64));
            self.tags.insert((p.min(q), p.max(q)), tag.clone());
        }
    }

    /// Structured block between the segment `r0 -> l0` (start) and `r1 -> l1`
    /// (end), `n_across` by `n_along` quads.
    pub fn block(&mut self, r0: Point, l0: Point, r1: Point, l1: Point, n_across: usize, n_along: usize) {
        let at = |i: usize, j: usize| {
            let u = i as f64 / n_across as f64;
            let v = j as f64 / n_along as f64;
            r0.lerp(l0, u).lerp(r1.lerp(l1, u), v)
        };
        for j in 0..n_along {
            for i in 0..n_across {
                self.quad([at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)]);
            }
        }
    }

    /// Fill a simple polygon, given by its subdivided boundary in
    /// counter-clockwise order, with a refined constrained Delaunay
    /// triangulation of target edge length `h`. Boundary vertices are kept.
    pub fn delaunay_fill(&mut self, boundary: &[Point], h: f64) -> Result<()> {
        let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
        let mut handles = Vec::with_capacity(boundary.len());
        for p in boundary {
            let v = cdt
                .insert(Point2::new(p.x, p.y))
                .map_err(|e| Error::DegenerateGeometry(format!("cannot triangulate junction core: {e:?}")))?;
            handles.push(v);
        }
        for i in 0..handles.len() {
            cdt.add_constraint(handles[i], handles[(i + 1) % handles.len()]);
        }
        let params = RefinementParameters::<f64>::new()
            .exclude_outer_faces(true)
            .keep_constraint_edges()
            .with_angle_limit(AngleLimit::from_deg(28.0))
            .with_max_allowed_area(0.5 * h * h)
            .with_max_additional_vertices(200_000);
        let result = cdt.refine(params);
        let outer: HashSet<_> = result.excluded_faces.into_iter().collect();
        for f in cdt.inner_faces() {
            if outer.contains(&f.fix()) {
                continue;
            }
            let [a, b, c] = f.positions().map(|q| Point::new(q.x, q.y));
            self.triangle(a, b, c);
        }
        Ok(())
    }

    /// Build the mesh. Tags on edges that ended up interior are dropped.
    pub fn finish(self) -> Result<TriMesh> {
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        let mut boundary: Vec<(usize, usize, BoundaryTag)> = self
            .tags
            .into_iter()
            .filter(|(k, _)| count.get(k) == Some(&1))
            .map(|((a, b), t)| (a, b, t))
            .collect();
        boundary.sort_by_key(|&(a, b, _)| (a, b));
        TriMesh::new(self.vertices, self.triangles, boundary)
    }
}

fn segments_for(len: f64, h: f64) -> usize {
    ((len / h) - 1e-9).ceil().max(1.0) as usize
}

/// Subdivide the polygon boundary so no piece is longer than `h`.
fn subdivided_boundary(geom: &JunctionGeometry, h: f64) -> Vec<Point> {
    let mut pts = Vec::new();
    for e in &geom.edges {
        let n = segments_for(e.a.distance(e.b), h);
        for i in 0..n {
            pts.push(e.a.lerp(e.b, i as f64 / n as f64));
        }
    }
    pts
}

fn reflect(p: Point, c: Point, d: Point) -> Point {
    let v = p - c;
    c + d * (2.0 * d.dot(v)) - v
}

/// A mirror axis of the core polygon through its centre, as a unit direction.
fn mirror_axis(geom: &JunctionGeometry) -> Option<Point> {
    let c = geom.center;
    let scale = geom.vertices.iter().map(|v| v.distance(c)).fold(0.0, f64::max);
    let tol = 1e-9 * scale;
    let angles: Vec<f64> = geom.arms.iter().map(|a| a.angle).collect();
    let mut candidates = angles.clone();
    for i in 0..angles.len() {
        for j in i + 1..angles.len() {
            candidates.push(0.5 * (angles[i] + angles[j]));
        }
    }
    candidates.into_iter().map(|a| Point::from_polar(1.0, a)).find(|&d| {
        geom.vertices
            .iter()
            .all(|&v| geom.vertices.iter().any(|&w| reflect(v, c, d).distance(w) <= tol))
    })
}

/// Half of a closed CCW loop on the left of the axis `c + t d`, closed along
/// the axis with pieces no longer than `h`.
fn half_loop(pts: &[Point], c: Point, d: Point, h: f64) -> Option<Vec<Point>> {
    let scale = pts.iter().map(|p| p.distance(c)).fold(0.0, f64::max);
    let tol = 1e-12 * scale;
    let side = |p: Point| d.cross(p - c);
    let snap = |p: Point| c + d * d.dot(p - c);
    // boundary with axis crossings inserted; on-axis points snapped exactly
    let mut ring: Vec<(Point, i8)> = Vec::new();
    let n = pts.len();
    for i in 0..n {
        let (p, q) = (pts[i], pts[(i + 1) % n]);
        let (sp, sq) = (side(p), side(q));
        let cls = |s: f64| if s.abs() <= tol { 0 } else if s > 0.0 { 1 } else { -1 };
        ring.push(if cls(sp) == 0 { (snap(p), 0) } else { (p, cls(sp)) });
        if cls(sp) * cls(sq) < 0 {
            let t = sp / (sp - sq);
            ring.push((snap(p.lerp(q, t)), 0));
        }
    }
    let m = ring.len();
    let start = (0..m).find(|&i| ring[i].1 == 0 && ring[(i + 1) % m].1 == 1)?;
    let mut half = vec![ring[start].0];
    let mut k = (start + 1) % m;
    while ring[k].1 != 0 {
        if ring[k].1 < 0 {
            return None;
        }
        half.push(ring[k].0);
        k = (k + 1) % m;
    }
    let (a, b) = (ring[k].0, ring[start].0);
    half.push(a);
    let segs = segments_for(a.distance(b), h);
    for i in 1..segs {
        half.push(a.lerp(b, i as f64 / segs as f64));
    }
    Some(half)
}

/// Triangulate the junction core. Mirror-symmetric cores are meshed on one
/// side of the axis and reflected so that symmetric flows stay symmetric.
fn fill_core(b: &mut MeshBuilder, geom: &JunctionGeometry, h: f64) -> Result<()> {
    let boundary = subdivided_boundary(geom, h);
    if let Some(d) = mirror_axis(geom) {
        if let Some(half) = half_loop(&boundary, geom.center, d, h) {
            let mut side = MeshBuilder::new(b.quantum);
            side.delaunay_fill(&half, h)?;
            for t in &side.triangles {
                let [p, q, r] = t.map(|i| side.vertices[i]);
                b.triangle(p, q, r);
                let c = geom.center;
                b.triangle(reflect(p, c, d), reflect(q, c, d), reflect(r, c, d));
            }
            return Ok(());
        }
    }
    b.delaunay_fill(&boundary, h)
}

/// Quantum for vertex merging relative to the element size.
fn quantum(h: f64) -> f64 {
    1e-7 * h
}

/// Local patch around one junction: the junction-shaped core plus structured
/// arms reaching `overlap` beyond each channel mouth. Arm ends are tagged as
/// coupling edges.
pub fn build_patch_mesh(
    network: &ChannelNetwork,
    geom: &JunctionGeometry,
    element_size: f64,
    overlap: &[f64],
) -> Result<TriMesh> {
    if !(element_size > 0.0) {
        return Err(Error::DegenerateGeometry("element size must be positive".into()));
    }
    let h = element_size;
    let mut b = MeshBuilder::new(quantum(h));
    fill_core(&mut b, geom, h)?;
    for (i, arm) in geom.arms.iter().enumerate() {
        let e = geom.edges[geom.coupling_edges[i]];
        let n_across = segments_for(arm.width, h);
        let d = arm.direction();
        let extra = geom.mouth_offsets[i] + overlap[i] - geom.coupling_offsets[i];
        let tag = BoundaryTag::Coupling { channel: network.channels[arm.channel].id.clone(), end: arm.end };
        if extra > 1e-9 * arm.width {
            let n_along = segments_for(extra, h);
            let (r1, l1) = (e.a + d * extra, e.b + d * extra);
            b.block(e.a, e.b, r1, l1, n_across, n_along);
            b.tag_segment(r1, l1, n_across, &tag);
        } else {
            b.tag_segment(e.a, e.b, n_across, &tag);
        }
    }
    b.finish()
}

/// Mesh of the whole network footprint for the reference 2D solver. Channel
/// ends at boundary nodes are tagged with the node id.
pub fn build_reference_mesh(network: &ChannelNetwork, element_size: f64) -> Result<TriMesh> {
    if !(element_size > 0.0) {
        return Err(Error::DegenerateGeometry("element size must be positive".into()));
    }
    let h = element_size;
    let mut b = MeshBuilder::new(quantum(h));
    let mut offsets: HashMap<(usize, ChannelEnd), f64> = HashMap::new();
    for (n, node) in network.nodes.iter().enumerate() {
        if let NodeKind::Junction(_) = node.kind {
            let arms = network.junction_arms(n);
            let geom = build_junction_polygon(node.position, &arms, network.protrusion)?;
            fill_core(&mut b, &geom, h)?;
            for (i, arm) in geom.arms.iter().enumerate() {
                offsets.insert((arm.channel, arm.end), geom.coupling_offsets[i]);
            }
            debug_assert!(geom.edges.iter().filter(|e| matches!(e.kind, EdgeKind::Coupling(_))).count() == arms.len());
        }
    }
    for (ci, ch) in network.channels.iter().enumerate() {
        let s0 = offsets.get(&(ci, ChannelEnd::Start)).copied().unwrap_or(0.0);
        let s1 = ch.axis_length() - offsets.get(&(ci, ChannelEnd::End)).copied().unwrap_or(0.0);
        if !(s1 > s0) {
            return Err(Error::DegenerateGeometry(format!("channel '{}' is shorter than its junction cores", ch.id)));
        }
        let d = ch.direction();
        let l = d.perp() * (0.5 * ch.width);
        let (a, c) = (ch.point_at(s0), ch.point_at(s1));
        let n_across = segments_for(ch.width, h);
        let n_along = segments_for(s1 - s0, h);
        b.block(a - l, a + l, c - l, c + l, n_across, n_along);
        for (end, p) in [(ChannelEnd::Start, a), (ChannelEnd::End, c)] {
            let node = &network.nodes[ch.node_at(end)];
            if let NodeKind::Boundary(_) = node.kind {
                b.tag_segment(p - l, p + l, n_across, &BoundaryTag::Node(node.id.clone()));
            }
        }
    }
    b.finish()
}
