//! Second-order finite volumes on 2D cells: the unstructured reference
//! solver, Method B patches and the single Method A element all run through
//! the same [`Zone`] description.

use crate::error::{Error, Result};
use crate::geometry::{
    perimeter, point_in_polygon, BoundaryTag, ChannelEnd, JunctionGeometry, PolygonEdge, Point, TriMesh,
};
use crate::riemann::{hllc_flux, wall_flux, RiemannData};
use crate::simulation::boundary::{apply_boundary, BoundaryCondition};
use crate::swe::{
    friction_source, max_wave_speed, time_derivative, ConservedState, EdgeRotation, Flux, PhysicalParams, H_DRY,
};

/// What lies on the far side of a face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceOuter {
    Cell(usize),
    Wall,
    Transparent,
    /// Index into `Zone::boundaries`.
    Boundary(usize),
    /// Index into `Zone::links`.
    Coupling(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZoneFace {
    pub inner: usize,
    pub outer: FaceOuter,
    pub midpoint: Point,
    pub length: f64,
    /// Rotation into the frame of the normal pointing out of `inner`.
    pub rot: EdgeRotation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZoneCell {
    pub centroid: Point,
    pub area: f64,
    pub vertices: Vec<Point>,
    /// `4 A / P`, the characteristic length for the CFL bound.
    pub cfl_length: f64,
    pub faces: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StencilEntry {
    Cell(usize),
    /// The 1D cell behind coupling link `i`.
    External(usize),
}

/// Connection between a zone and one channel end.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingLink {
    pub channel: usize,
    pub end: ChannelEnd,
    pub faces: Vec<usize>,
    /// Channel axis angle (direction of `+s`).
    pub alpha: f64,
    /// 2D position of the adjacent 1D cell centre.
    pub neighbor_point: Point,
}

impl CouplingLink {
    /// Total length of the coupling faces.
    pub fn length(&self, zone: &Zone) -> f64 {
        self.faces.iter().map(|&f| zone.faces[f].length).sum()
    }
}

/// A set of 2D cells with their faces, stencils and external connections.
#[derive(Clone, Debug, PartialEq)]
pub struct Zone {
    pub cells: Vec<ZoneCell>,
    pub faces: Vec<ZoneFace>,
    pub stencils: Vec<Vec<StencilEntry>>,
    pub links: Vec<CouplingLink>,
    pub boundaries: Vec<(String, BoundaryCondition)>,
}

/// How a mesh boundary tag maps onto the zone.
pub enum ResolvedTag {
    Wall,
    Transparent,
    Boundary(String, BoundaryCondition),
    Coupling { channel: usize, end: ChannelEnd, alpha: f64 },
}

impl Zone {
    /// The single junction-shaped element of Method A.
    pub fn from_polygon(geom: &JunctionGeometry, alphas: &[f64]) -> Zone {
        let mut faces = Vec::new();
        let mut links: Vec<CouplingLink> = geom
            .arms
            .iter()
            .zip(alphas)
            .map(|(a, &alpha)| CouplingLink {
                channel: a.channel,
                end: a.end,
                faces: Vec::new(),
                alpha,
                neighbor_point: geom.center,
            })
            .collect();
        for (j, e) in geom.edges.iter().enumerate() {
            let outer = match e.kind {
                crate::geometry::EdgeKind::Coupling(i) => {
                    links[i].faces.push(j);
                    FaceOuter::Coupling(i)
                }
                crate::geometry::EdgeKind::Wall => FaceOuter::Wall,
            };
            faces.push(face_from_edge(0, outer, e));
        }
        let cell = ZoneCell {
            centroid: geom.centroid,
            area: geom.area,
            vertices: geom.vertices.clone(),
            cfl_length: geom.cfl_length(),
            faces: (0..faces.len()).collect(),
        };
        let stencils = vec![(0..links.len()).map(StencilEntry::External).collect()];
        Zone { cells: vec![cell], faces, stencils, links, boundaries: Vec::new() }
    }

    /// A triangular mesh, with boundary tags resolved by the caller.
    pub fn from_mesh(mesh: &TriMesh, mut resolve: impl FnMut(&BoundaryTag) -> Result<ResolvedTag>) -> Result<Zone> {
        let mut cells: Vec<ZoneCell> = (0..mesh.triangles.len())
            .map(|t| {
                let v = mesh.triangle_points(t).to_vec();
                let area = mesh.area(t);
                ZoneCell { centroid: mesh.centroid(t), area, cfl_length: 4.0 * area / perimeter(&v), vertices: v, faces: Vec::new() }
            })
            .collect();
        let mut faces = Vec::with_capacity(mesh.edges.len());
        let mut links: Vec<CouplingLink> = Vec::new();
        let mut boundaries: Vec<(String, BoundaryCondition)> = Vec::new();
        for e in &mesh.edges {
            let (a, b) = (mesh.vertices[e.a], mesh.vertices[e.b]);
            let outer = match e.right {
                Some(r) => FaceOuter::Cell(r),
                None => match resolve(e.tag.as_ref().unwrap_or(&BoundaryTag::Wall))? {
                    ResolvedTag::Wall => FaceOuter::Wall,
                    ResolvedTag::Transparent => FaceOuter::Transparent,
                    ResolvedTag::Boundary(id, bc) => {
                        let i = match boundaries.iter().position(|(n, _)| *n == id) {
                            Some(i) => i,
                            None => {
                                boundaries.push((id, bc));
                                boundaries.len() - 1
                            }
                        };
                        FaceOuter::Boundary(i)
                    }
                    ResolvedTag::Coupling { channel, end, alpha } => {
                        let i = match links.iter().position(|l| l.channel == channel && l.end == end) {
                            Some(i) => i,
                            None => {
                                links.push(CouplingLink { channel, end, faces: Vec::new(), alpha, neighbor_point: a });
                                links.len() - 1
                            }
                        };
                        links[i].faces.push(faces.len());
                        FaceOuter::Coupling(i)
                    }
                },
            };
            let t = b - a;
            let rot = EdgeRotation::from_normal(t.y, -t.x);
            let f = faces.len();
            cells[e.left].faces.push(f);
            if let Some(r) = e.right {
                cells[r].faces.push(f);
            }
            faces.push(ZoneFace { inner: e.left, outer, midpoint: a.lerp(b, 0.5), length: t.norm(), rot });
        }
        let stencils = build_stencils(&cells, &faces);
        Ok(Zone { cells, faces, stencils, links, boundaries })
    }

    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(|c| c.area).sum()
    }

    /// Cell containing `p`, if any.
    pub fn locate(&self, p: Point) -> Option<usize> {
        self.cells.iter().position(|c| point_in_polygon(p, &c.vertices)).or_else(|| {
            // on an outer edge: take the nearest cell if it is close
            let (i, c) = self
                .cells
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.centroid.distance(p).total_cmp(&b.1.centroid.distance(p)))?;
            let reach = c.vertices.iter().map(|v| v.distance(c.centroid)).fold(0.0, f64::max);
            (c.centroid.distance(p) <= reach * (1.0 + 1e-9)).then_some(i)
        })
    }

    /// Outward rotation seen from `cell` for face `f`.
    pub fn face_rotation(&self, f: usize, cell: usize) -> EdgeRotation {
        let face = &self.faces[f];
        if face.inner == cell { face.rot } else { face.rot.reversed() }
    }
}

fn face_from_edge(inner: usize, outer: FaceOuter, e: &PolygonEdge) -> ZoneFace {
    ZoneFace { inner, outer, midpoint: e.midpoint(), length: e.length, rot: EdgeRotation::new(e.theta) }
}

fn build_stencils(cells: &[ZoneCell], faces: &[ZoneFace]) -> Vec<Vec<StencilEntry>> {
    cells
        .iter()
        .enumerate()
        .map(|(c, cell)| {
            let mut s: Vec<StencilEntry> = Vec::new();
            for &f in &cell.faces {
                let face = &faces[f];
                let entry = match face.outer {
                    FaceOuter::Cell(r) => Some(StencilEntry::Cell(if face.inner == c { r } else { face.inner })),
                    FaceOuter::Coupling(l) => Some(StencilEntry::External(l)),
                    _ => None,
                };
                if let Some(e) = entry {
                    if !s.contains(&e) {
                        s.push(e);
                    }
                }
            }
            s
        })
        .collect()
}

/// Limited linear reconstruction of one cell: `Q(x) = a + b (x - x_c) + c (y - y_c)`
/// per conserved variable, with `a` the cell average.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CellGradient {
    pub dx: ConservedState,
    pub dy: ConservedState,
    /// Barth–Jespersen factors for `(h, hu, hv)`.
    pub phi: [f64; 3],
    /// Set when the stencil was singular and the gradient was zeroed.
    pub singular: bool,
}

/// Cell averages and workspace of a zone.
#[derive(Clone, Debug, PartialEq)]
pub struct ZoneField {
    pub cells: Vec<ConservedState>,
    pub grads: Vec<CellGradient>,
    /// Per-cell sum of `L_e F_e` over faces, outward positive.
    pub residual: Vec<Flux>,
}

impl ZoneField {
    pub fn new(cells: Vec<ConservedState>) -> Self {
        let n = cells.len();
        ZoneField { cells, grads: vec![CellGradient::default(); n], residual: vec![Flux::ZERO; n] }
    }

    pub fn volume(&self, zone: &Zone) -> f64 {
        self.cells.iter().zip(&zone.cells).map(|(q, c)| q.h * c.area).sum()
    }

    pub fn momentum(&self, zone: &Zone) -> (f64, f64) {
        self.cells
            .iter()
            .zip(&zone.cells)
            .fold((0.0, 0.0), |(x, y), (q, c)| (x + q.hu * c.area, y + q.hv * c.area))
    }

    /// Reconstructed value of cell `c` at `p`.
    #[inline]
    pub fn value_at(&self, zone: &Zone, c: usize, p: Point) -> ConservedState {
        let d = p - zone.cells[c].centroid;
        let g = &self.grads[c];
        self.cells[c] + g.dx * d.x + g.dy * d.y
    }

    /// Reconstructed and half-step evolved value of cell `c` at `p` (global frame).
    pub fn evolved_at(&self, zone: &Zone, c: usize, p: Point, dt: f64, params: &PhysicalParams) -> Result<ConservedState> {
        evolve_half_step(self.value_at(zone, c, p), &self.grads[c], dt, params)
    }
}

/// Half-step Cauchy–Kowalewskaya evolution with both Jacobian terms.
pub fn evolve_half_step(q: ConservedState, g: &CellGradient, dt: f64, params: &PhysicalParams) -> Result<ConservedState> {
    if (g.dx == ConservedState::ZERO && g.dy == ConservedState::ZERO) || dt == 0.0 {
        return Ok(q);
    }
    let evolved = q + time_derivative(q, g.dx, g.dy, params)? * (0.5 * dt);
    if evolved.h > H_DRY && evolved.is_finite() {
        Ok(evolved)
    } else {
        Ok(q)
    }
}

const COMPONENTS: usize = 3;

fn component(q: &ConservedState, i: usize) -> f64 {
    match i {
        0 => q.h,
        1 => q.hu,
        _ => q.hv,
    }
}

fn set_component(q: &mut ConservedState, i: usize, v: f64) {
    match i {
        0 => q.h = v,
        1 => q.hu = v,
        _ => q.hv = v,
    }
}

/// Solve for `(b, c)` from two difference rows; `None` if singular.
fn solve2(r1: Point, r2: Point, d1: f64, d2: f64) -> Option<(f64, f64)> {
    let det = r1.cross(r2);
    let scale = r1.dot(r1).max(r2.dot(r2));
    if det.abs() <= 1e-10 * scale {
        return None;
    }
    Some(((d1 * r2.y - d2 * r1.y) / det, (r1.x * d2 - r2.x * d1) / det))
}

/// Reconstruct and limit the gradients of every cell. `external[i]` is the
/// global-frame state of the 1D cell behind coupling link `i`.
pub fn reconstruct_2d(zone: &Zone, field: &mut ZoneField, external: &[ConservedState]) {
    let mut pts: Vec<(Point, ConservedState)> = Vec::with_capacity(8);
    for c in 0..zone.cells.len() {
        pts.clear();
        for e in &zone.stencils[c] {
            pts.push(match *e {
                StencilEntry::Cell(j) => (zone.cells[j].centroid, field.cells[j]),
                StencilEntry::External(l) => (zone.links[l].neighbor_point, external[l]),
            });
        }
        field.grads[c] = cell_gradient(&zone.cells[c], field.cells[c], &pts);
    }
}

/// Gradient of one cell from its stencil points, limited per variable.
pub fn cell_gradient(cell: &ZoneCell, q: ConservedState, pts: &[(Point, ConservedState)]) -> CellGradient {
    let mut g = CellGradient { phi: [1.0; 3], ..Default::default() };
    if pts.len() < 2 {
        return g;
    }
    let xc = cell.centroid;
    for i in 0..COMPONENTS {
        let qc = component(&q, i);
        let fit = match pts.len() {
            2 => solve2(pts[0].0 - xc, pts[1].0 - xc, component(&pts[0].1, i) - qc, component(&pts[1].1, i) - qc),
            3 => {
                // plane through the three neighbour centroids
                let v0 = component(&pts[0].1, i);
                solve2(
                    pts[1].0 - pts[0].0,
                    pts[2].0 - pts[0].0,
                    component(&pts[1].1, i) - v0,
                    component(&pts[2].1, i) - v0,
                )
            }
            _ => {
                let (mut sxx, mut sxy, mut syy, mut sx, mut sy) = (0.0, 0.0, 0.0, 0.0, 0.0);
                for (p, v) in pts {
                    let d = *p - xc;
                    let dv = component(v, i) - qc;
                    sxx += d.x * d.x;
                    sxy += d.x * d.y;
                    syy += d.y * d.y;
                    sx += d.x * dv;
                    sy += d.y * dv;
                }
                let det = sxx * syy - sxy * sxy;
                if det.abs() <= 1e-10 * (sxx * syy).max(1e-300) {
                    None
                } else {
                    Some(((sx * syy - sy * sxy) / det, (sy * sxx - sx * sxy) / det))
                }
            }
        };
        let Some((b, cc)) = fit else {
            g.singular = true;
            set_component(&mut g.dx, i, 0.0);
            set_component(&mut g.dy, i, 0.0);
            continue;
        };
        let mut lo = qc;
        let mut hi = qc;
        for (_, v) in pts {
            let x = component(v, i);
            lo = lo.min(x);
            hi = hi.max(x);
        }
        let mut phi: f64 = 1.0;
        for v in &cell.vertices {
            let d = *v - xc;
            let delta = b * d.x + cc * d.y;
            if delta > 0.0 {
                phi = phi.min((hi - qc) / delta);
            } else if delta < 0.0 {
                phi = phi.min((lo - qc) / delta);
            }
        }
        let phi = phi.clamp(0.0, 1.0);
        g.phi[i] = phi;
        set_component(&mut g.dx, i, b * phi);
        set_component(&mut g.dy, i, cc * phi);
    }
    g
}

/// Global-frame flux through a face from evolved states on each side:
/// rotate, solve HLLC, rotate back.
pub fn edge_flux_2d(left: ConservedState, right: ConservedState, rot: &EdgeRotation, params: &PhysicalParams) -> Result<Flux> {
    let f = hllc_flux(&RiemannData::new(rot.rotate(left), rot.rotate(right)), params)?;
    Ok(rot.rotate_back_flux(f))
}

/// Global-frame flux through a non-coupling boundary face.
pub fn boundary_flux_2d(
    inner: ConservedState,
    outer: FaceOuter,
    rot: &EdgeRotation,
    zone: &Zone,
    t: f64,
    params: &PhysicalParams,
) -> Result<Flux> {
    let q = rot.rotate(inner);
    let f = match outer {
        FaceOuter::Wall => wall_flux(q, params)?,
        FaceOuter::Transparent => hllc_flux(&RiemannData::new(q, q), params)?,
        FaceOuter::Boundary(b) => apply_boundary(q, &zone.boundaries[b].1, t, params)?,
        FaceOuter::Cell(_) | FaceOuter::Coupling(_) => {
            return Err(Error::DegenerateGeometry("boundary flux requested for an interior face".into()))
        }
    };
    Ok(rot.rotate_back_flux(f))
}

/// Accumulate `L_e F_e` into the residual for every face that is not a
/// coupling face. `t_bc` is the time at which boundary data are evaluated.
/// Returns the volume flowing out through boundary faces per unit time.
pub fn zone_fluxes(zone: &Zone, field: &mut ZoneField, dt: f64, t_bc: f64, params: &PhysicalParams) -> Result<f64> {
    let mut outflow = 0.0;
    for face in &zone.faces {
        let inner = field.evolved_at(zone, face.inner, face.midpoint, dt, params)?;
        let flux = match face.outer {
            FaceOuter::Coupling(_) => continue,
            FaceOuter::Cell(r) => {
                let outer = field.evolved_at(zone, r, face.midpoint, dt, params)?;
                let f = edge_flux_2d(inner, outer, &face.rot, params)? * face.length;
                field.residual[r] -= f;
                f
            }
            other => {
                let f = boundary_flux_2d(inner, other, &face.rot, zone, t_bc, params)? * face.length;
                outflow += f.mass;
                f
            }
        };
        field.residual[face.inner] += flux;
    }
    Ok(outflow)
}

/// `Q_k -= dt / |V_k| Σ L_e F_e` plus pointwise friction; clears the residual.
pub fn update_2d(zone: &Zone, field: &mut ZoneField, dt: f64, params: &PhysicalParams, label: &str) -> Result<()> {
    for (k, cell) in zone.cells.iter().enumerate() {
        let q = field.cells[k];
        let mut next = q - field.residual[k].as_state() * (dt / cell.area);
        if params.friction_enabled {
            next += friction_source(q, params)?.as_state() * dt;
        }
        if !(next.h > H_DRY) || !next.is_finite() {
            return Err(Error::Positivity { location: format!("{label} cell {k}"), h: next.h });
        }
        field.cells[k] = next;
        field.residual[k] = Flux::ZERO;
    }
    Ok(())
}

/// Largest stable step for the zone: `cfl_2d * (4A/P) / λ` over cells.
pub fn zone_dt(zone: &Zone, field: &ZoneField, cfl_2d: f64, params: &PhysicalParams) -> Result<f64> {
    let mut dt = f64::INFINITY;
    for (q, c) in field.cells.iter().zip(&zone.cells) {
        let lam = max_wave_speed(*q, params)?;
        if lam > 0.0 {
            dt = dt.min(cfl_2d * c.cfl_length / lam);
        }
    }
    Ok(dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::builder::MeshBuilder;
    use crate::geometry::parse_trimesh;
    use approx::assert_abs_diff_eq;

    fn p() -> PhysicalParams {
        PhysicalParams::default()
    }

    fn walls(_: &BoundaryTag) -> Result<ResolvedTag> {
        Ok(ResolvedTag::Wall)
    }

    fn square_mesh(n: usize) -> TriMesh {
        let mut b = MeshBuilder::new(1e-9);
        b.block(Point::new(0.0, 0.0), Point::new(0.0, 1.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), n, n);
        b.finish().unwrap()
    }

    #[test]
    fn constant_field_has_zero_gradient() {
        let zone = Zone::from_mesh(&square_mesh(3), walls).unwrap();
        let mut f = ZoneField::new(vec![ConservedState::from_primitive(0.5, 0.1, 0.2); zone.cells.len()]);
        reconstruct_2d(&zone, &mut f, &[]);
        for g in &f.grads {
            assert_eq!(g.dx.max_abs(), 0.0);
            assert_eq!(g.dy.max_abs(), 0.0);
            assert_eq!(g.phi, [1.0; 3]);
        }
    }

    #[test]
    fn linear_field_recovered_on_interior_stencil() {
        let zone = Zone::from_mesh(&square_mesh(4), walls).unwrap();
        let lin = |p: Point| ConservedState::new(1.0 + 0.2 * p.x - 0.1 * p.y, 0.0, 0.0);
        let cells = zone.cells.iter().map(|c| lin(c.centroid)).collect();
        let mut f = ZoneField::new(cells);
        reconstruct_2d(&zone, &mut f, &[]);
        let mut checked = 0;
        for (c, g) in f.grads.iter().enumerate() {
            // the limiter may scale the plane but not turn it
            if zone.stencils[c].len() == 3 && g.phi[0] > 0.0 {
                assert_abs_diff_eq!(g.dx.h, 0.2 * g.phi[0], epsilon = 1e-12);
                assert_abs_diff_eq!(g.dy.h, -0.1 * g.phi[0], epsilon = 1e-12);
                checked += 1;
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn local_maximum_gets_zero_limiter() {
        let zone = Zone::from_mesh(&square_mesh(3), walls).unwrap();
        let mut cells = vec![ConservedState::at_rest(1.0); zone.cells.len()];
        let c = (0..zone.cells.len()).find(|&c| zone.stencils[c].len() == 3).unwrap();
        cells[c].h = 2.0;
        let mut f = ZoneField::new(cells);
        // tilt the neighbours so the fit is non-zero
        for (i, e) in zone.stencils[c].iter().enumerate() {
            if let StencilEntry::Cell(j) = e {
                f.cells[*j].h = 1.0 + 0.1 * i as f64;
            }
        }
        reconstruct_2d(&zone, &mut f, &[]);
        assert_eq!(f.grads[c].phi[0], 0.0);
        assert_eq!(f.grads[c].dx.h, 0.0);
    }

    #[test]
    fn collinear_stencil_is_flagged() {
        let cell = ZoneCell {
            centroid: Point::new(0.0, 0.0),
            area: 1.0,
            vertices: vec![Point::new(-1.0, -1.0), Point::new(1.0, -1.0), Point::new(0.0, 1.0)],
            cfl_length: 1.0,
            faces: vec![],
        };
        let q = ConservedState::at_rest(1.0);
        let pts = [(Point::new(-1.0, 0.0), ConservedState::at_rest(0.9)), (Point::new(1.0, 0.0), ConservedState::at_rest(1.1))];
        let g = cell_gradient(&cell, q, &pts);
        assert!(g.singular);
        assert_eq!(g.dx.h, 0.0);
    }

    #[test]
    fn still_water_edge_flux_is_hydrostatic() {
        let q = ConservedState::at_rest(0.8);
        for theta in [0.0, 0.4, 2.0, -1.3] {
            let rot = EdgeRotation::new(theta);
            let f = edge_flux_2d(q, q, &rot, &p()).unwrap();
            let pr = 0.5 * 9.81 * 0.64;
            assert_abs_diff_eq!(f.mass, 0.0);
            assert_abs_diff_eq!(f.mom_x, pr * theta.cos(), epsilon = 1e-14);
            assert_abs_diff_eq!(f.mom_y, pr * theta.sin(), epsilon = 1e-14);
        }
    }

    #[test]
    fn theta_zero_matches_1d_interface() {
        let l = ConservedState::from_primitive(1.0, 0.3, 0.0);
        let r = ConservedState::from_primitive(0.6, -0.1, 0.0);
        let f2 = edge_flux_2d(l, r, &EdgeRotation::new(0.0), &p()).unwrap();
        let f1 = hllc_flux(&RiemannData::new(l, r), &p()).unwrap();
        assert_eq!(f1, f2);
    }

    #[test]
    fn closed_mesh_still_water_and_single_triangle_update() {
        let zone = Zone::from_mesh(&square_mesh(3), walls).unwrap();
        let mut f = ZoneField::new(vec![ConservedState::at_rest(1.0); zone.cells.len()]);
        zone_fluxes(&zone, &mut f, 0.01, 0.0, &p()).unwrap();
        update_2d(&zone, &mut f, 0.01, &p(), "z").unwrap();
        for q in &f.cells {
            assert!((q.h - 1.0).abs() < 1e-13 && q.hu.abs() < 1e-13 && q.hv.abs() < 1e-13);
        }

        let m = parse_trimesh("3 1 0\n0 0\n2 0\n0 2\n0 1 2\n").unwrap();
        let zone = Zone::from_mesh(&m, walls).unwrap();
        let mut f = ZoneField::new(vec![ConservedState::at_rest(1.0)]);
        f.residual[0] = Flux::new(0.4, 0.2, -0.1);
        update_2d(&zone, &mut f, 0.5, &p(), "z").unwrap();
        assert_abs_diff_eq!(f.cells[0].h, 1.0 - 0.5 / 2.0 * 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(f.cells[0].hu, -0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(f.cells[0].hv, 0.025, epsilon = 1e-15);
    }

    #[test]
    fn face_normals_point_out_of_inner_cell() {
        let zone = Zone::from_mesh(&square_mesh(2), walls).unwrap();
        for face in &zone.faces {
            let (nx, ny) = face.rot.normal();
            let d = face.midpoint - zone.cells[face.inner].centroid;
            assert!(nx * d.x + ny * d.y > 0.0);
        }
        assert!((zone.total_area() - 1.0).abs() < 1e-12);
        assert_eq!(zone.locate(Point::new(0.3, 0.3)).map(|c| point_in_polygon(Point::new(0.3, 0.3), &zone.cells[c].vertices)), Some(true));
    }
}
