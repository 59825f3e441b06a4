//! Coupling between 1D channels and 2D junction elements.
//!
//! A coupling face separates a 2D cell from the end of a 1D channel. The
//! Riemann problem is posed in the zone's outward frame across the face; the
//! same flux (shared mode, the default) feeds both sides so that mass and
//! momentum leave one side exactly as they enter the other.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    builder::build_patch_mesh, load_trimesh, BoundaryTag, ChannelEnd, ChannelGrid, ChannelNetwork, JunctionGeometry,
    NodeKind, PatchSource, Point, TriMesh,
};
use crate::riemann::{hllc_flux, RiemannData};
use crate::scheme1d::{extrapolate, grp_half_step, Channel1DField, EndNeighbor};
use crate::scheme2d::{edge_flux_2d, evolve_half_step, update_2d, zone_fluxes, CellGradient, ResolvedTag, Zone, ZoneField};
use crate::swe::{ConservedState, EdgeRotation, Flux, PhysicalParams};

/// How the 1D side obtains its end flux.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingMode {
    /// One Riemann solve per coupling face, shared by both sides.
    #[default]
    Shared,
    /// The 1D side solves its own Riemann problem in the channel frame.
    /// Not conservative; kept for comparison.
    TwoPass,
}

/// Treatment of transverse momentum received by a 1D cell.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransverseMode {
    /// Fold the transverse component into the axial one, keeping |V|.
    #[default]
    Project,
    /// Discard the transverse component.
    Zero,
}

/// Remove transverse momentum from a channel-frame state.
pub fn project_transverse(q: ConservedState, mode: TransverseMode) -> ConservedState {
    match mode {
        TransverseMode::Project => ConservedState { h: q.h, hu: q.hu.hypot(q.hv).copysign(q.hu), hv: 0.0 },
        TransverseMode::Zero => ConservedState { hv: 0.0, ..q },
    }
}

/// Global velocity gradients from gradients along a channel axis at angle
/// `alpha`: `∂x = cos α ∂n`, `∂y = sin α ∂n`, and the velocity components
/// are turned back to the global frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VelocityGradients {
    pub du_dx: f64,
    pub du_dy: f64,
    pub dv_dx: f64,
    pub dv_dy: f64,
}

pub fn rotate_gradients(dn_u: f64, dn_v: f64, alpha: f64) -> VelocityGradients {
    let (s, c) = alpha.sin_cos();
    let gu = c * dn_u - s * dn_v;
    let gv = s * dn_u + c * dn_v;
    VelocityGradients { du_dx: c * gu, du_dy: s * gu, dv_dx: c * gv, dv_dy: s * gv }
}

/// Same turn for the conserved variables: an axial slope becomes a global
/// gradient with momentum components in the global frame.
pub fn rotate_conserved_slope(slope: ConservedState, alpha: f64) -> CellGradient {
    let rot = EdgeRotation::new(alpha);
    let g = rot.rotate_back(slope);
    CellGradient { dx: g * rot.cos(), dy: g * rot.sin(), phi: [1.0; 3], singular: false }
}

/// 1D face data: the reconstructed state at the channel end and its slope,
/// both in the channel frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelFace {
    pub state: ConservedState,
    pub slope: ConservedState,
}

impl ChannelFace {
    pub fn at_end(grid: &ChannelGrid, field: &Channel1DField, end: ChannelEnd) -> ChannelFace {
        let k = grid.end_cell(end);
        let state = extrapolate(grid, field, k, grid.face_at(end));
        ChannelFace { state: ConservedState { hv: 0.0, ..state }, slope: field.slopes[k] }
    }

    /// Half-step evolved value in the global frame, using the rotated gradient.
    pub fn evolved_global(&self, alpha: f64, dt: f64, params: &PhysicalParams) -> Result<ConservedState> {
        let q = EdgeRotation::new(alpha).rotate_back(self.state);
        evolve_half_step(q, &rotate_conserved_slope(self.slope, alpha), dt, params)
    }

    /// Half-step evolved value in the channel frame.
    pub fn evolved_channel(&self, dt: f64, params: &PhysicalParams) -> Result<ConservedState> {
        grp_half_step(self.state, self.slope, dt, params)
    }
}

/// Global-frame flux leaving the zone through one coupling face (per unit length).
pub fn coupling_flux(
    zone_state: ConservedState,
    channel_state: ConservedState,
    face_rot: &EdgeRotation,
    params: &PhysicalParams,
) -> Result<Flux> {
    edge_flux_2d(zone_state, channel_state, face_rot, params)
}

/// Convert the total flux `Σ L_e G_e` leaving a zone into a channel into the
/// per-unit-width flux along `+s` at that channel end.
pub fn channel_end_flux(total: Flux, alpha: f64, width: f64, end: ChannelEnd) -> Flux {
    let sign = -end.outward_sign();
    EdgeRotation::new(alpha).rotate_flux(total) * (sign / width)
}

/// End flux seen by the 1D side in two-pass mode: its own Riemann problem in
/// the channel frame against each face's zone state, length-weighted.
pub fn two_pass_channel_flux(
    channel_state: ConservedState,
    zone_states: &[(f64, ConservedState)],
    alpha: f64,
    end: ChannelEnd,
    params: &PhysicalParams,
) -> Result<Flux> {
    let rot = EdgeRotation::new(alpha);
    let total: f64 = zone_states.iter().map(|(l, _)| l).sum();
    let mut f = Flux::ZERO;
    for &(l, q) in zone_states {
        let zq = rot.rotate(q);
        let d = match end {
            ChannelEnd::End => RiemannData::new(channel_state, zq),
            ChannelEnd::Start => RiemannData::new(zq, channel_state),
        };
        f += hllc_flux(&d, params)? * (l / total);
    }
    Ok(f)
}

/// Couple one link of a zone to its channel end. The zone's residual
/// receives `L_e G_e` for every face of the link; the return value is the
/// channel's end flux along `+s` per unit width.
#[allow(clippy::too_many_arguments)]
pub fn couple_link(
    zone: &Zone,
    field: &mut ZoneField,
    link: usize,
    grid: &ChannelGrid,
    channel_field: &Channel1DField,
    dt: f64,
    params: &PhysicalParams,
    mode: CouplingMode,
) -> Result<Flux> {
    let l = &zone.links[link];
    let face_1d = ChannelFace::at_end(grid, channel_field, l.end);
    let q1 = face_1d.evolved_global(l.alpha, dt, params)?;
    let mut total = Flux::ZERO;
    let mut zone_states = Vec::new();
    for &f in &l.faces {
        let face = &zone.faces[f];
        let qz = field.evolved_at(zone, face.inner, face.midpoint, dt, params)?;
        let g = coupling_flux(qz, q1, &face.rot, params)? * face.length;
        field.residual[face.inner] += g;
        total += g;
        zone_states.push((face.length, qz));
    }
    match mode {
        CouplingMode::Shared => Ok(channel_end_flux(total, l.alpha, grid.width, l.end)),
        CouplingMode::TwoPass => {
            let q1c = face_1d.evolved_channel(dt, params)?;
            two_pass_channel_flux(q1c, &zone_states, l.alpha, l.end, params)
        }
    }
}

/// The zone cell average next to a channel end, as the 1D stencil point:
/// length-weighted over the link's faces, in the channel frame.
pub fn zone_end_neighbor(zone: &Zone, field: &ZoneField, link: usize, axis_s: impl Fn(Point) -> f64) -> EndNeighbor {
    let l = &zone.links[link];
    let mut q = ConservedState::ZERO;
    let mut c = Point::new(0.0, 0.0);
    let mut w = 0.0;
    for &f in &l.faces {
        let face = &zone.faces[f];
        q += field.cells[face.inner] * face.length;
        c = c + zone.cells[face.inner].centroid * face.length;
        w += face.length;
    }
    let q = q * (1.0 / w);
    EndNeighbor { s: axis_s(c * (1.0 / w)), state: EdgeRotation::new(l.alpha).rotate(q) }
}

/// Global-frame states of the 1D end cells behind each link, for zone reconstruction.
pub fn external_states(zone: &Zone, grids: &[ChannelGrid], fields: &[Channel1DField]) -> Vec<ConservedState> {
    zone.links
        .iter()
        .map(|l| {
            let k = grids[l.channel].end_cell(l.end);
            EdgeRotation::new(l.alpha).rotate_back(fields[l.channel].cells[k])
        })
        .collect()
}

/// Place each link's stencil point at the adjacent 1D cell centre.
pub fn attach_links(zone: &mut Zone, network: &ChannelNetwork, grids: &[ChannelGrid]) {
    for l in &mut zone.links {
        let g = &grids[l.channel];
        l.neighbor_point = network.channels[l.channel].point_at(g.centers[g.end_cell(l.end)]);
    }
}

/// Resolve a mesh boundary tag against the network.
pub fn resolve_tag(network: &ChannelNetwork, tag: &BoundaryTag) -> Result<ResolvedTag> {
    Ok(match tag {
        BoundaryTag::Wall => ResolvedTag::Wall,
        BoundaryTag::Transparent => ResolvedTag::Transparent,
        BoundaryTag::Node(id) => {
            let n = network
                .node_index(id)
                .ok_or_else(|| Error::MeshParse { line: 0, message: format!("unknown node '{id}' in boundary tag") })?;
            match &network.nodes[n].kind {
                NodeKind::Boundary(bc) => ResolvedTag::Boundary(id.clone(), bc.clone()),
                NodeKind::Junction(_) => {
                    return Err(Error::MeshParse { line: 0, message: format!("node '{id}' is not a boundary node") })
                }
            }
        }
        BoundaryTag::Coupling { channel, end } => {
            let c = network
                .channel_index(channel)
                .ok_or_else(|| Error::MeshParse { line: 0, message: format!("unknown channel '{channel}' in coupling tag") })?;
            ResolvedTag::Coupling { channel: c, end: *end, alpha: network.channels[c].axis_angle() }
        }
    })
}

/// Which 2D treatment a junction zone uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZoneKind {
    /// One polygonal element.
    MethodA,
    /// A local triangular patch.
    MethodB,
}

/// A 2D junction zone and its state.
#[derive(Clone, Debug, PartialEq)]
pub struct JunctionZone {
    pub node: usize,
    pub label: String,
    pub kind: ZoneKind,
    pub geometry: JunctionGeometry,
    pub zone: Zone,
    pub field: ZoneField,
}

impl JunctionZone {
    /// Single-element zone. Links follow the order of `geometry.arms`.
    pub fn method_a(network: &ChannelNetwork, node: usize, geometry: JunctionGeometry, initial: ConservedState) -> Self {
        let alphas: Vec<f64> = geometry.arms.iter().map(|a| network.channels[a.channel].axis_angle()).collect();
        let zone = Zone::from_polygon(&geometry, &alphas);
        let field = ZoneField::new(vec![initial; zone.cells.len()]);
        JunctionZone { node, label: format!("junction '{}'", network.nodes[node].id), kind: ZoneKind::MethodA, geometry, zone, field }
    }

    /// Patch zone from a generated or loaded mesh. `overlap[i]` is the depth
    /// reached beyond the mouth of arm `i`.
    pub fn method_b(
        network: &ChannelNetwork,
        node: usize,
        geometry: JunctionGeometry,
        source: &PatchSource,
        overlap: &[f64],
        initial: ConservedState,
    ) -> Result<Self> {
        let mesh: TriMesh = match source {
            PatchSource::Generated { element_size, .. } => build_patch_mesh(network, &geometry, *element_size, overlap)?,
            PatchSource::MeshFile { path, .. } => load_trimesh(path)?,
        };
        let zone = Zone::from_mesh(&mesh, |t| resolve_tag(network, t))?;
        for a in &geometry.arms {
            if !zone.links.iter().any(|l| l.channel == a.channel && l.end == a.end) {
                return Err(Error::DegenerateGeometry(format!(
                    "patch of junction '{}' has no coupling edge for channel '{}'",
                    network.nodes[node].id, network.channels[a.channel].id
                )));
            }
        }
        let field = ZoneField::new(vec![initial; zone.cells.len()]);
        Ok(JunctionZone { node, label: format!("junction '{}'", network.nodes[node].id), kind: ZoneKind::MethodB, geometry, zone, field })
    }

    pub fn volume(&self) -> f64 {
        self.field.volume(&self.zone)
    }
}

/// Wall and interior fluxes of a junction zone, accumulated after coupling.
pub fn junction_interior_fluxes(j: &mut JunctionZone, dt: f64, t_bc: f64, params: &PhysicalParams) -> Result<()> {
    zone_fluxes(&j.zone, &mut j.field, dt, t_bc, params).map(|_| ())
}

/// Method A update of the single element from its accumulated edge fluxes.
pub fn step_junction_a(j: &mut JunctionZone, dt: f64, params: &PhysicalParams) -> Result<()> {
    debug_assert_eq!(j.kind, ZoneKind::MethodA);
    update_2d(&j.zone, &mut j.field, dt, params, &j.label)
}

/// Method B update of the patch from its accumulated edge fluxes.
pub fn step_junction_b(j: &mut JunctionZone, dt: f64, params: &PhysicalParams) -> Result<()> {
    debug_assert_eq!(j.kind, ZoneKind::MethodB);
    update_2d(&j.zone, &mut j.field, dt, params, &j.label)
}

/// Update a zone with the step that matches its kind.
pub fn step_junction(j: &mut JunctionZone, dt: f64, params: &PhysicalParams) -> Result<()> {
    match j.kind {
        ZoneKind::MethodA => step_junction_a(j, dt, params),
        ZoneKind::MethodB => step_junction_b(j, dt, params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_junction_polygon, discretize_channel, EndTrim};
    use crate::geometry::{Channel, JunctionStrategy, Node};
    use crate::scheme1d::reconstruct_1d;
    use crate::simulation::boundary::BoundaryCondition;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn p() -> PhysicalParams {
        PhysicalParams::default()
    }

    #[test]
    fn project_keeps_speed_and_sign() {
        let q = project_transverse(ConservedState::new(0.2, -0.03, 0.04), TransverseMode::Project);
        assert_abs_diff_eq!(q.hu, -0.05, epsilon = 1e-15);
        assert_eq!(q.hv, 0.0);
        let z = project_transverse(ConservedState::new(0.2, -0.03, 0.04), TransverseMode::Zero);
        assert_eq!(z, ConservedState::new(0.2, -0.03, 0.0));
    }

    #[test]
    fn rotate_gradients_examples() {
        let g = rotate_gradients(1.0, 0.0, 0.0);
        assert_eq!(g, VelocityGradients { du_dx: 1.0, du_dy: 0.0, dv_dx: 0.0, dv_dy: 0.0 });
        let g = rotate_gradients(1.0, 0.0, PI / 2.0);
        assert_abs_diff_eq!(g.du_dx, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.dv_dy, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.du_dy, 0.0, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn global_evolution_matches_channel_frame(
            alpha in -PI..PI, h in 0.05f64..0.5, u in -0.8f64..0.8,
            dh in -0.5f64..0.5, dhu in -0.5f64..0.5, dt in 0.0f64..0.01,
        ) {
            let face = ChannelFace { state: ConservedState::new(h, h * u, 0.0), slope: ConservedState::new(dh, dhu, 0.0) };
            let rot = EdgeRotation::new(alpha);
            let a = face.evolved_global(alpha, dt, &p()).unwrap();
            let b = rot.rotate_back(face.evolved_channel(dt, &p()).unwrap());
            prop_assert!((a - b).max_abs() < 1e-12);
        }

        #[test]
        fn velocity_gradient_rotation_matches_conserved(alpha in -PI..PI, du in -1.0f64..1.0, dv in -1.0f64..1.0) {
            // with h = 1 and no depth slope, conserved slopes are velocity slopes
            let g = rotate_gradients(du, dv, alpha);
            let c = rotate_conserved_slope(ConservedState::new(0.0, du, dv), alpha);
            prop_assert!((g.du_dx - c.dx.hu).abs() < 1e-14 && (g.du_dy - c.dy.hu).abs() < 1e-14);
            prop_assert!((g.dv_dx - c.dx.hv).abs() < 1e-14 && (g.dv_dy - c.dy.hv).abs() < 1e-14);
        }

        #[test]
        fn shared_flux_is_conservative(
            alpha in -PI..PI, theta_off in -0.3f64..0.3, h1 in 0.05f64..0.4, u1 in -0.8f64..0.8,
            h2 in 0.05f64..0.4, u2 in -0.8f64..0.8, v2 in -0.5f64..0.5, b in 0.1f64..0.5,
            at_start in any::<bool>(),
        ) {
            let end = if at_start { ChannelEnd::Start } else { ChannelEnd::End };
            // zone outward normal points into the channel
            let inward = if at_start { alpha } else { alpha + PI };
            let rot = EdgeRotation::new(inward + theta_off);
            let q1 = EdgeRotation::new(alpha).rotate_back(ConservedState::new(h1, h1 * u1, 0.0));
            let qz = ConservedState::from_primitive(h2, u2, v2);
            let g = coupling_flux(qz, q1, &rot, &p()).unwrap() * b;
            let f = channel_end_flux(g, alpha, b, end);
            // the channel gains exactly what the zone loses
            let gain = EdgeRotation::new(alpha).rotate_back_flux(f) * (b * -end.outward_sign());
            prop_assert!((gain.mass - g.mass).abs() <= 1e-15 * g.mass.abs().max(1.0));
            prop_assert!((gain.mom_x - g.mom_x).abs() <= 1e-14 * g.mom_x.abs().max(1.0));
            prop_assert!((gain.mom_y - g.mom_y).abs() <= 1e-14 * g.mom_y.abs().max(1.0));
        }
    }

    #[test]
    fn two_pass_matches_shared_on_aligned_faces() {
        let alpha = 0.3;
        let rot_a = EdgeRotation::new(alpha);
        let q1c = ConservedState::new(0.2, 0.04, 0.0);
        let qz = rot_a.rotate_back(ConservedState::new(0.15, 0.02, 0.0));
        // junction at the channel end: zone outward normal is -axis
        let face_rot = EdgeRotation::new(alpha + PI);
        let g = coupling_flux(qz, rot_a.rotate_back(q1c), &face_rot, &p()).unwrap() * 0.3;
        let shared = channel_end_flux(g, alpha, 0.3, ChannelEnd::End);
        let two = two_pass_channel_flux(q1c, &[(0.3, qz)], alpha, ChannelEnd::End, &p()).unwrap();
        assert!((shared - two).as_state().max_abs() < 1e-13);
    }

    fn y_network(strategy: JunctionStrategy) -> ChannelNetwork {
        let bc = BoundaryCondition::Reflective;
        let nodes = vec![
            Node { id: "in".into(), position: Point::new(-2.0, 0.0), kind: NodeKind::Boundary(bc.clone()) },
            Node { id: "j".into(), position: Point::new(0.0, 0.0), kind: NodeKind::Junction(strategy) },
            Node { id: "a".into(), position: Point::from_polar(2.0, PI / 4.0), kind: NodeKind::Boundary(bc.clone()) },
            Node { id: "b".into(), position: Point::from_polar(2.0, -PI / 4.0), kind: NodeKind::Boundary(bc) },
        ];
        let ch = |id: &str, from: usize, to: usize, w: f64, nodes: &[Node]| Channel {
            id: id.into(),
            width: w,
            cell_count: 20,
            from,
            to,
            start: nodes[from].position,
            end: nodes[to].position,
        };
        let channels = vec![ch("p", 0, 1, 0.4, &nodes), ch("d1", 1, 2, 0.3, &nodes), ch("d2", 1, 3, 0.3, &nodes)];
        ChannelNetwork { nodes, channels, protrusion: 0.1 }
    }

    /// Closed Y network with a Method A element: total volume is constant
    /// and still water stays still.
    fn run_closed(strategy: JunctionStrategy, steps: usize, bump: bool) -> (f64, f64, f64) {
        let net = y_network(strategy.clone());
        let arms = net.junction_arms(1);
        let geom = build_junction_polygon(net.nodes[1].position, &arms, net.protrusion).unwrap();
        let mut grids = Vec::new();
        for (ci, ch) in net.channels.iter().enumerate() {
            let i = geom.arms.iter().position(|a| a.channel == ci).unwrap();
            let trim = match &strategy {
                JunctionStrategy::MethodB(_) => EndTrim::Junction { mouth: geom.mouth_offsets[i], overlap: 0.2 * ch.width },
                _ => EndTrim::Junction { mouth: geom.mouth_offsets[i], overlap: net.protrusion * ch.width },
            };
            let (s, e) = if ch.from == 1 { (trim, EndTrim::None) } else { (EndTrim::None, trim) };
            grids.push(discretize_channel(ch, s, e).unwrap());
        }
        let mut jz = match &strategy {
            JunctionStrategy::MethodB(src) => {
                let ov: Vec<f64> = geom.arms.iter().map(|a| 0.2 * a.width).collect();
                JunctionZone::method_b(&net, 1, geom, src, &ov, ConservedState::at_rest(0.16)).unwrap()
            }
            _ => JunctionZone::method_a(&net, 1, geom, ConservedState::at_rest(0.16)),
        };
        attach_links(&mut jz.zone, &net, &grids);
        let mut fields: Vec<Channel1DField> = grids
            .iter()
            .enumerate()
            .map(|(ci, g)| {
                Channel1DField::new(
                    (0..g.len())
                        .map(|k| {
                            let h = if bump && ci == 0 && k < 5 { 0.2 } else { 0.16 };
                            ConservedState::at_rest(h)
                        })
                        .collect(),
                )
            })
            .collect();
        let vol = |jz: &JunctionZone, fields: &[Channel1DField]| {
            jz.volume() + fields.iter().zip(&grids).map(|(f, g)| f.volume(g)).sum::<f64>()
        };
        let v0 = vol(&jz, &fields);
        let dt = 0.004;
        let mut max_u: f64 = 0.0;
        for _ in 0..steps {
            // reconstruct
            let ext = external_states(&jz.zone, &grids, &fields);
            crate::scheme2d::reconstruct_2d(&jz.zone, &mut jz.field, &ext);
            for (ci, g) in grids.iter().enumerate() {
                let link = jz.zone.links.iter().position(|l| l.channel == ci).unwrap();
                let end = jz.zone.links[link].end;
                let nb = zone_end_neighbor(&jz.zone, &jz.field, link, |p| net.channels[ci].s_of(p));
                let (s, e) = if end == ChannelEnd::Start { (Some(nb), None) } else { (None, Some(nb)) };
                let f = &mut fields[ci];
                let cells = f.cells.clone();
                reconstruct_1d(g, &cells, s, e, &mut f.slopes);
            }
            // fluxes
            let mut all = Vec::new();
            for (ci, g) in grids.iter().enumerate() {
                let mut fl = vec![Flux::ZERO; g.len() + 1];
                crate::scheme1d::interior_fluxes(g, &fields[ci], dt, &p(), &mut fl).unwrap();
                let link = jz.zone.links.iter().position(|l| l.channel == ci).unwrap();
                let end = jz.zone.links[link].end;
                let cf = couple_link(&jz.zone, &mut jz.field, link, g, &fields[ci], dt, &p(), CouplingMode::Shared).unwrap();
                // far end is a wall
                let k = g.end_cell(end.other());
                let rot = EdgeRotation::new(if end == ChannelEnd::Start { 0.0 } else { PI });
                let w = rot.rotate_back_flux(crate::riemann::wall_flux(rot.rotate(fields[ci].cells[k]), &p()).unwrap());
                match end {
                    ChannelEnd::Start => {
                        fl[0] = cf;
                        fl[g.len()] = w;
                    }
                    ChannelEnd::End => {
                        fl[g.len()] = cf;
                        fl[0] = -w;
                    }
                }
                all.push(fl);
            }
            junction_interior_fluxes(&mut jz, dt, 0.0, &p()).unwrap();
            step_junction(&mut jz, dt, &p()).unwrap();
            for (ci, g) in grids.iter().enumerate() {
                crate::scheme1d::update_1d(g, &mut fields[ci], &all[ci], dt, &p(), "test").unwrap();
                for q in &mut fields[ci].cells {
                    *q = project_transverse(*q, TransverseMode::Project);
                    max_u = max_u.max((q.hu / q.h).abs());
                }
            }
            for q in &jz.field.cells {
                max_u = max_u.max((q.hu / q.h).abs()).max((q.hv / q.h).abs());
            }
        }
        (v0, vol(&jz, &fields), max_u)
    }

    #[test]
    fn method_a_still_water_and_conservation() {
        let (v0, v1, u) = run_closed(JunctionStrategy::MethodA, 200, false);
        assert_abs_diff_eq!(v0, v1, epsilon = 1e-12 * v0);
        assert!(u < 1e-12, "still water disturbed: {u}");
        let (v0, v1, _) = run_closed(JunctionStrategy::MethodA, 200, true);
        assert_abs_diff_eq!(v0, v1, epsilon = 1e-12 * v0);
    }

    #[test]
    fn method_b_still_water_and_conservation() {
        let src = PatchSource::Generated { element_size: 0.06, extension: 0.2 };
        let (v0, v1, u) = run_closed(JunctionStrategy::MethodB(src.clone()), 100, false);
        assert_abs_diff_eq!(v0, v1, epsilon = 1e-12 * v0);
        assert!(u < 1e-11, "still water disturbed: {u}");
        let (v0, v1, _) = run_closed(JunctionStrategy::MethodB(src), 100, true);
        assert_abs_diff_eq!(v0, v1, epsilon = 1e-12 * v0);
    }

    #[test]
    fn unknown_tags_are_errors() {
        let net = y_network(JunctionStrategy::MethodA);
        assert!(resolve_tag(&net, &BoundaryTag::Node("zz".into())).is_err());
        assert!(resolve_tag(&net, &BoundaryTag::Node("j".into())).is_err());
        assert!(matches!(resolve_tag(&net, &BoundaryTag::Node("in".into())).unwrap(), ResolvedTag::Boundary(..)));
        let c = resolve_tag(&net, &BoundaryTag::Coupling { channel: "d1".into(), end: ChannelEnd::Start }).unwrap();
        assert!(matches!(c, ResolvedTag::Coupling { channel: 1, end: ChannelEnd::Start, .. }));
    }
}
