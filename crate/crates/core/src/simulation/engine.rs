use std::time::Instant;

use serde::Serialize;

use super::boundary::{apply_boundary, BoundaryCondition};
use super::gauges::GaugeRecord;
use crate::config::{FlowState, RunMode, ScenarioConfig};
use crate::error::{Error, Result};
use crate::geometry::{
    build_junction_polygon, build_reference_mesh, discretize_channel, load_trimesh, point_in_polygon, ChannelEnd,
    ChannelGrid, ChannelNetwork, EndTrim, JunctionGeometry, JunctionStrategy, NodeKind, Point,
};
use crate::junctions::{
    attach_links, couple_link, junction_interior_fluxes, project_transverse, resolve_tag, step_junction,
    zone_end_neighbor, CouplingMode, JunctionZone, TransverseMode,
};
use crate::psfp::{psfp_boundary_fluxes, psfp_solve, PsfpArm, PsfpProblem};
use crate::scheme1d::{evolved_face, interior_fluxes, reconstruct_1d, update_1d, Channel1DField, EndNeighbor};
use crate::scheme2d::{reconstruct_2d, update_2d, zone_dt, zone_fluxes, Zone, ZoneField};
use crate::swe::{max_wave_speed, ConservedState, EdgeRotation, Flux, PhysicalParams};

/// Numerical options shared by every part of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Numerics {
    pub order: u8,
    pub cfl_1d: f64,
    pub coupling: CouplingMode,
    pub transverse: TransverseMode,
}

#[derive(Clone, Debug, PartialEq)]
enum EndLink {
    Boundary(BoundaryCondition),
    Zone { zone: usize, link: usize },
    Psfp,
}

/// One channel's grid, state and the flux buffer of its faces.
#[derive(Clone, Debug)]
pub struct ChannelState {
    pub id: String,
    pub grid: ChannelGrid,
    pub field: Channel1DField,
    fluxes: Vec<Flux>,
    ends: [EndLink; 2],
    backup: Vec<ConservedState>,
}

impl ChannelState {
    fn end(&self, end: ChannelEnd) -> &EndLink {
        &self.ends[end_index(end)]
    }
}

fn end_index(end: ChannelEnd) -> usize {
    match end {
        ChannelEnd::Start => 0,
        ChannelEnd::End => 1,
    }
}

#[derive(Clone, Debug)]
struct PsfpJunction {
    id: String,
    arms: Vec<(usize, ChannelEnd)>,
}

#[derive(Clone, Debug)]
enum Probe {
    Channel { channel: usize, cell: usize },
    Zone { zone: usize, cell: usize, axis: Option<Point> },
    Reference { cell: usize, axis: Option<Point> },
}

#[derive(Clone, Debug)]
struct Gauge {
    id: String,
    probe: Probe,
}

/// Wall-clock seconds spent per part of the solver.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub channels_1d: f64,
    pub junction_zones: f64,
    pub psfp: f64,
    pub reference_2d: f64,
    pub gauges: f64,
    pub total: f64,
}

/// Outcome of a complete run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub name: String,
    pub steps: usize,
    pub t_final: f64,
    pub gauges: Vec<GaugeRecord>,
    pub initial_volume: f64,
    pub final_volume: f64,
    /// Time-integrated volume that left through boundaries.
    pub boundary_outflow: f64,
    /// `(final - (initial - outflow)) / initial`.
    pub volume_error: f64,
    pub cells_1d: usize,
    pub cells_2d: usize,
    pub psfp_solves: usize,
    pub psfp_max_iterations: usize,
    pub timings: Timings,
}

/// Last valid state before a failed step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub step: usize,
    pub channels: Vec<(String, Vec<[f64; 3]>)>,
    pub zones: Vec<(String, Vec<[f64; 3]>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunFailure {
    pub error: Error,
    pub snapshot: Snapshot,
    pub report: RunReport,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "run failed at t = {} s (step {}): {}", self.snapshot.t, self.snapshot.step, self.error)
    }
}

/// A network (or reference 2D) simulation built from a scenario.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub name: String,
    pub network: ChannelNetwork,
    pub params: PhysicalParams,
    pub numerics: Numerics,
    pub channels: Vec<ChannelState>,
    pub zones: Vec<JunctionZone>,
    pub reference: Option<(Zone, ZoneField)>,
    psfp: Vec<PsfpJunction>,
    gauges: Vec<Gauge>,
    records: Vec<GaugeRecord>,
    zone_backup: Vec<Vec<ConservedState>>,
    t: f64,
    step: usize,
    t_end: f64,
    stride: usize,
    initial_volume: f64,
    boundary_outflow: f64,
    psfp_solves: usize,
    psfp_max_iterations: usize,
    timings: Timings,
}

struct InitialState<'a> {
    cfg: &'a ScenarioConfig,
    network: &'a ChannelNetwork,
    cores: Vec<(usize, JunctionGeometry)>,
}

impl InitialState<'_> {
    fn channel(&self, channel: usize, s: f64) -> FlowState {
        let id = &self.network.channels[channel].id;
        self.cfg
            .initial
            .channels
            .iter()
            .filter(|c| &c.channel == id)
            .flat_map(|c| c.segments.iter())
            .find(|seg| seg.from_s <= s && s <= seg.to_s)
            .map(|seg| FlowState { h: seg.h, u: seg.u })
            .unwrap_or(self.cfg.initial.default)
    }

    fn junction(&self, node: usize) -> ConservedState {
        let id = &self.network.nodes[node].id;
        match self.cfg.initial.junctions.iter().find(|j| &j.node == id) {
            Some(j) => ConservedState::from_primitive(j.h, j.u, j.v),
            None => ConservedState::from_primitive(self.cfg.initial.default.h, 0.0, 0.0),
        }
    }

    /// State at a 2D point: the junction core it lies in, else the channel
    /// strip it lies in, else the default.
    fn at_point(&self, p: Point) -> ConservedState {
        if let Some((node, _)) = self.cores.iter().find(|(_, g)| point_in_polygon(p, &g.vertices)) {
            return self.junction(*node);
        }
        for (ci, ch) in self.network.channels.iter().enumerate() {
            let s = ch.s_of(p);
            if (0.0..=ch.axis_length()).contains(&s) && ch.lateral_of(p).abs() <= 0.5 * ch.width * (1.0 + 1e-9) {
                let f = self.channel(ci, s);
                let d = ch.direction();
                return ConservedState::from_primitive(f.h, f.u * d.x, f.u * d.y);
            }
        }
        let f = self.cfg.initial.default;
        ConservedState::from_primitive(f.h, 0.0, 0.0)
    }
}

fn fields_of(states: &[ConservedState]) -> Vec<[f64; 3]> {
    states.iter().map(|q| q.to_array()).collect()
}

impl Simulation {
    pub fn new(cfg: &ScenarioConfig) -> Result<Simulation> {
        cfg.validate()?;
        let network = cfg.network()?;
        let params = cfg.physics.params();
        let numerics = Numerics {
            order: cfg.numerics.order,
            cfl_1d: cfg.numerics.cfl_1d,
            coupling: cfg.numerics.coupling,
            transverse: cfg.numerics.transverse,
        };
        let mut cores = Vec::new();
        for (n, node) in network.nodes.iter().enumerate() {
            if let NodeKind::Junction(strategy) = &node.kind {
                if cfg.numerics.mode == RunMode::Reference || !matches!(strategy, JunctionStrategy::Psfp) {
                    cores.push((n, build_junction_polygon(node.position, &network.junction_arms(n), network.protrusion)?));
                }
            }
        }
        let init = InitialState { cfg, network: &network, cores };
        let mut sim = Simulation {
            name: cfg.name.clone(),
            params,
            numerics,
            channels: Vec::new(),
            zones: Vec::new(),
            reference: None,
            psfp: Vec::new(),
            gauges: Vec::new(),
            records: Vec::new(),
            zone_backup: Vec::new(),
            t: 0.0,
            step: 0,
            t_end: cfg.outputs.t_end,
            stride: cfg.outputs.stride,
            initial_volume: 0.0,
            boundary_outflow: 0.0,
            psfp_solves: 0,
            psfp_max_iterations: 0,
            timings: Timings::default(),
            network: network.clone(),
        };
        match cfg.numerics.mode {
            RunMode::Reference => sim.build_reference(cfg, &init)?,
            RunMode::Network => sim.build_network(&init)?,
        }
        sim.build_gauges(cfg)?;
        sim.initial_volume = sim.total_volume();
        sim.sample_gauges();
        Ok(sim)
    }

    fn build_reference(&mut self, cfg: &ScenarioConfig, init: &InitialState) -> Result<()> {
        let net = &self.network;
        let rc = cfg.numerics.reference.as_ref().expect("validated reference settings");
        let mesh = match (&rc.element_size, &rc.mesh_file) {
            (_, Some(f)) => load_trimesh(&cfg.resolve(f))?,
            (Some(h), None) => build_reference_mesh(net, *h)?,
            (None, None) => unreachable!("validated reference settings"),
        };
        let zone = Zone::from_mesh(&mesh, |t| resolve_tag(net, t))?;
        if !zone.links.is_empty() {
            return Err(Error::MeshParse { line: 0, message: "reference mesh must not carry coupling edges".into() });
        }
        let field = ZoneField::new(zone.cells.iter().map(|c| init.at_point(c.centroid)).collect());
        self.reference = Some((zone, field));
        Ok(())
    }

    fn build_network(&mut self, init: &InitialState) -> Result<()> {
        let net = &self.network;
        // end trims and zones
        let mut trims = vec![[EndTrim::None; 2]; net.channels.len()];
        let mut zones = Vec::new();
        for (node, geom) in &init.cores {
            let NodeKind::Junction(strategy) = &net.nodes[*node].kind else { continue };
            let overlap: Vec<f64> = match strategy {
                JunctionStrategy::MethodB(src) => {
                    geom.arms.iter().map(|a| src.extension().max(net.protrusion * a.width)).collect()
                }
                _ => geom.arms.iter().map(|a| net.protrusion * a.width).collect(),
            };
            for (i, a) in geom.arms.iter().enumerate() {
                trims[a.channel][end_index(a.end)] = EndTrim::Junction { mouth: geom.mouth_offsets[i], overlap: overlap[i] };
            }
            let q0 = init.junction(*node);
            let mut jz = match strategy {
                JunctionStrategy::MethodA => JunctionZone::method_a(net, *node, geom.clone(), q0),
                JunctionStrategy::MethodB(src) => JunctionZone::method_b(net, *node, geom.clone(), src, &overlap, q0)?,
                JunctionStrategy::Psfp => continue,
            };
            if jz.kind == crate::junctions::ZoneKind::MethodB {
                for (c, cell) in jz.zone.cells.iter().enumerate() {
                    jz.field.cells[c] = init.at_point(cell.centroid);
                }
            }
            zones.push(jz);
        }
        let mut channels = Vec::with_capacity(net.channels.len());
        for (ci, ch) in net.channels.iter().enumerate() {
            let grid = discretize_channel(ch, trims[ci][0], trims[ci][1])?;
            let cells = grid
                .centers
                .iter()
                .map(|&s| {
                    let f = init.channel(ci, s);
                    ConservedState::from_primitive(f.h, f.u, 0.0)
                })
                .collect();
            let link = |end: ChannelEnd| -> EndLink {
                let node = &net.nodes[ch.node_at(end)];
                match &node.kind {
                    NodeKind::Boundary(bc) => EndLink::Boundary(bc.clone()),
                    NodeKind::Junction(JunctionStrategy::Psfp) => EndLink::Psfp,
                    NodeKind::Junction(_) => {
                        let (z, l) = zones
                            .iter()
                            .enumerate()
                            .find_map(|(z, jz): (usize, &JunctionZone)| {
                                jz.zone.links.iter().position(|l| l.channel == ci && l.end == end).map(|l| (z, l))
                            })
                            .expect("every junction arm has a coupling link");
                        EndLink::Zone { zone: z, link: l }
                    }
                }
            };
            let ends = [link(ChannelEnd::Start), link(ChannelEnd::End)];
            let n = grid.len();
            channels.push(ChannelState {
                id: ch.id.clone(),
                grid,
                field: Channel1DField::new(cells),
                fluxes: vec![Flux::ZERO; n + 1],
                ends,
                backup: Vec::new(),
            });
        }
        let grids: Vec<ChannelGrid> = channels.iter().map(|c| c.grid.clone()).collect();
        for jz in &mut zones {
            attach_links(&mut jz.zone, net, &grids);
        }
        for (n, node) in net.nodes.iter().enumerate() {
            if let NodeKind::Junction(JunctionStrategy::Psfp) = node.kind {
                self.psfp.push(PsfpJunction { id: node.id.clone(), arms: net.incident(n) });
            }
        }
        self.zone_backup = vec![Vec::new(); zones.len()];
        self.channels = channels;
        self.zones = zones;
        Ok(())
    }

    fn build_gauges(&mut self, cfg: &ScenarioConfig) -> Result<()> {
        for g in &cfg.outputs.gauges {
            let (point, axis, channel_s) = match (&g.channel, g.s, g.x, g.y) {
                (Some(c), Some(s), _, _) => {
                    let ci = self.network.channel_index(c).expect("validated gauge channel");
                    let ch = &self.network.channels[ci];
                    (ch.point_at(s), Some(ch.direction()), Some((ci, s)))
                }
                (_, _, Some(x), Some(y)) => (Point::new(x, y), None, None),
                _ => unreachable!("validated gauge location"),
            };
            let unplaced = || Error::ConfigInvalid(vec![format!("gauge '{}' is outside the computational domain", g.id)]);
            let probe = if let Some((zone, _)) = &self.reference {
                Probe::Reference { cell: zone.locate(point).ok_or_else(unplaced)?, axis }
            } else {
                let on_grid = channel_s.and_then(|(ci, s)| self.channels[ci].grid.locate(s).map(|k| (ci, k)));
                match on_grid {
                    Some((channel, cell)) => Probe::Channel { channel, cell },
                    None => {
                        let (zone, cell) = self
                            .zones
                            .iter()
                            .enumerate()
                            .find_map(|(z, jz)| jz.zone.locate(point).map(|c| (z, c)))
                            .ok_or_else(unplaced)?;
                        Probe::Zone { zone, cell, axis }
                    }
                }
            };
            self.gauges.push(Gauge { id: g.id.clone(), probe });
        }
        Ok(())
    }

    /// Overwrite the cells of channel `channel` with `f(s_left, s_right)`,
    /// typically a cell average. The volume ledger restarts from here.
    pub fn set_channel_state(&mut self, channel: usize, f: impl Fn(f64, f64) -> ConservedState) {
        let c = &mut self.channels[channel];
        for k in 0..c.grid.len() {
            let (s, l) = (c.grid.centers[k], c.grid.lengths[k]);
            c.field.cells[k] = f(s - 0.5 * l, s + 0.5 * l);
        }
        self.initial_volume = self.total_volume();
        self.boundary_outflow = 0.0;
        self.records.clear();
        self.sample_gauges();
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn steps(&self) -> usize {
        self.step
    }

    pub fn records(&self) -> &[GaugeRecord] {
        &self.records
    }

    pub fn cells_1d(&self) -> usize {
        self.channels.iter().map(|c| c.grid.len()).sum()
    }

    pub fn cells_2d(&self) -> usize {
        self.zones.iter().map(|z| z.zone.cells.len()).sum::<usize>()
            + self.reference.as_ref().map_or(0, |(z, _)| z.cells.len())
    }

    pub fn total_volume(&self) -> f64 {
        // fixed summation order keeps runs reproducible
        let mut v = 0.0;
        for c in &self.channels {
            v += c.field.volume(&c.grid);
        }
        for z in &self.zones {
            v += z.volume();
        }
        if let Some((zone, field)) = &self.reference {
            v += field.volume(zone);
        }
        v
    }

    /// Largest velocity component anywhere, in each part's own frame.
    pub fn max_velocity(&self) -> f64 {
        let mut m: f64 = 0.0;
        let mut scan = |q: &ConservedState| m = m.max((q.hu / q.h).abs()).max((q.hv / q.h).abs());
        self.channels.iter().flat_map(|c| c.field.cells.iter()).for_each(&mut scan);
        self.zones.iter().flat_map(|z| z.field.cells.iter()).for_each(&mut scan);
        if let Some((_, f)) = &self.reference {
            f.cells.iter().for_each(&mut scan);
        }
        m
    }

    /// Smallest depth anywhere.
    pub fn min_depth(&self) -> f64 {
        let mut m = f64::INFINITY;
        for q in self.channels.iter().flat_map(|c| c.field.cells.iter()) {
            m = m.min(q.h);
        }
        for q in self.zones.iter().flat_map(|z| z.field.cells.iter()) {
            m = m.min(q.h);
        }
        if let Some((_, f)) = &self.reference {
            for q in &f.cells {
                m = m.min(q.h);
            }
        }
        m
    }

    /// Global step: the minimum of `cfl Δs / λ` over 1D cells and
    /// `cfl / 2 · (4A/P) / λ` over 2D cells, clamped to `t_end`.
    pub fn compute_dt(&self) -> Result<f64> {
        let cfl = self.numerics.cfl_1d;
        let mut dt = f64::INFINITY;
        for c in &self.channels {
            for (q, len) in c.field.cells.iter().zip(&c.grid.lengths) {
                let lam = max_wave_speed(*q, &self.params)?;
                if lam > 0.0 {
                    dt = dt.min(cfl * len / lam);
                }
            }
        }
        for z in &self.zones {
            dt = dt.min(zone_dt(&z.zone, &z.field, 0.5 * cfl, &self.params)?);
        }
        if let Some((zone, field)) = &self.reference {
            dt = dt.min(zone_dt(zone, field, 0.5 * cfl, &self.params)?);
        }
        let dt = dt.min(self.t_end - self.t);
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::ZeroTimeStep(self.t));
        }
        Ok(dt)
    }

    fn end_neighbor(&self, ci: usize, end: ChannelEnd) -> Option<EndNeighbor> {
        match self.channels[ci].end(end) {
            EndLink::Zone { zone, link } => {
                let jz = &self.zones[*zone];
                let ch = &self.network.channels[ci];
                Some(zone_end_neighbor(&jz.zone, &jz.field, *link, |p| ch.s_of(p)))
            }
            _ => None,
        }
    }

    /// One step of size `dt`. On error the state is rolled back to the
    /// beginning of the step.
    pub fn advance(&mut self, dt: f64) -> Result<()> {
        let second = self.numerics.order == 2;
        let p = self.params;
        let t_bc = self.t + 0.5 * dt;
        let dt_grp = if second { dt } else { 0.0 };

        // reconstruction
        if second {
            let clock = Instant::now();
            for ci in 0..self.channels.len() {
                let s = self.end_neighbor(ci, ChannelEnd::Start);
                let e = self.end_neighbor(ci, ChannelEnd::End);
                let c = &mut self.channels[ci];
                reconstruct_1d(&c.grid, &c.field.cells, s, e, &mut c.field.slopes);
            }
            self.timings.channels_1d += clock.elapsed().as_secs_f64();
            let clock = Instant::now();
            for jz in &mut self.zones {
                let ext: Vec<ConservedState> = jz
                    .zone
                    .links
                    .iter()
                    .map(|l| {
                        let c = &self.channels[l.channel];
                        EdgeRotation::new(l.alpha).rotate_back(c.field.cells[c.grid.end_cell(l.end)])
                    })
                    .collect();
                reconstruct_2d(&jz.zone, &mut jz.field, &ext);
            }
            self.timings.junction_zones += clock.elapsed().as_secs_f64();
            if let Some((zone, field)) = &mut self.reference {
                let clock = Instant::now();
                reconstruct_2d(zone, field, &[]);
                self.timings.reference_2d += clock.elapsed().as_secs_f64();
            }
        }

        // coupling, boundary and junction-solver fluxes
        let clock = Instant::now();
        for z in 0..self.zones.len() {
            for link in 0..self.zones[z].zone.links.len() {
                let (ci, end) = {
                    let l = &self.zones[z].zone.links[link];
                    (l.channel, l.end)
                };
                let jz = &mut self.zones[z];
                let c = &self.channels[ci];
                let f = couple_link(&jz.zone, &mut jz.field, link, &c.grid, &c.field, dt_grp, &p, self.numerics.coupling)?;
                let c = &mut self.channels[ci];
                let face = if end == ChannelEnd::Start { 0 } else { c.grid.len() };
                c.fluxes[face] = f;
            }
        }
        self.timings.junction_zones += clock.elapsed().as_secs_f64();
        let clock = Instant::now();
        let mut outflow = 0.0;
        for c in &mut self.channels {
            for end in [ChannelEnd::Start, ChannelEnd::End] {
                let EndLink::Boundary(bc) = c.end(end) else { continue };
                let k = c.grid.end_cell(end);
                let q = evolved_face(&c.grid, &c.field, k, end == ChannelEnd::End, dt_grp, &p)?;
                let rot = EdgeRotation::new(if end == ChannelEnd::End { 0.0 } else { std::f64::consts::PI });
                let f = apply_boundary(rot.rotate(q), bc, t_bc, &p)?;
                outflow += c.grid.width * f.mass;
                match end {
                    ChannelEnd::End => c.fluxes[c.grid.len()] = f,
                    ChannelEnd::Start => c.fluxes[0] = -rot.rotate_back_flux(f),
                }
            }
        }
        self.timings.channels_1d += clock.elapsed().as_secs_f64();
        let clock = Instant::now();
        for j in &self.psfp {
            let mut arms = [PsfpArm { width: 0.0, h: 0.0, u: 0.0, sigma: 0.0 }; 3];
            for (i, &(ci, end)) in j.arms.iter().enumerate() {
                let c = &self.channels[ci];
                let q = c.field.cells[c.grid.end_cell(end)];
                arms[i] = PsfpArm { width: c.grid.width, h: q.h, u: q.hu / q.h, sigma: PsfpArm::sigma_for(end) };
            }
            let sol = psfp_solve(&PsfpProblem { arms }, &p).map_err(|e| {
                log::error!(
                    "junction '{}' at t = {} s: {} (trace length {}, last residual {:e})",
                    j.id,
                    self.t,
                    e.failure,
                    e.trace.len(),
                    e.trace.last().copied().unwrap_or(f64::NAN)
                );
                Error::Psfp { junction: j.id.clone(), time: self.t, failure: e.failure }
            })?;
            self.psfp_solves += 1;
            self.psfp_max_iterations = self.psfp_max_iterations.max(sol.iterations);
            let fl = psfp_boundary_fluxes(&sol.state, &p);
            for (i, &(ci, end)) in j.arms.iter().enumerate() {
                let c = &mut self.channels[ci];
                let face = if end == ChannelEnd::Start { 0 } else { c.grid.len() };
                c.fluxes[face] = fl[i];
            }
        }
        self.timings.psfp += clock.elapsed().as_secs_f64();

        // interior fluxes
        let clock = Instant::now();
        for c in &mut self.channels {
            interior_fluxes(&c.grid, &c.field, dt_grp, &p, &mut c.fluxes)?;
        }
        self.timings.channels_1d += clock.elapsed().as_secs_f64();
        let clock = Instant::now();
        for jz in &mut self.zones {
            junction_interior_fluxes(jz, dt_grp, t_bc, &p)?;
        }
        self.timings.junction_zones += clock.elapsed().as_secs_f64();
        if let Some((zone, field)) = &mut self.reference {
            let clock = Instant::now();
            outflow += zone_fluxes(zone, field, dt_grp, t_bc, &p)?;
            self.timings.reference_2d += clock.elapsed().as_secs_f64();
        }

        // updates, with the previous state kept for roll-back
        for c in &mut self.channels {
            c.backup.clone_from(&c.field.cells);
        }
        for (b, jz) in self.zone_backup.iter_mut().zip(&self.zones) {
            b.clone_from(&jz.field.cells);
        }
        if let Err(e) = self.update_all(dt) {
            self.rollback();
            return Err(e);
        }
        self.t += dt;
        self.step += 1;
        self.boundary_outflow += dt * outflow;
        Ok(())
    }

    fn update_all(&mut self, dt: f64) -> Result<()> {
        let p = self.params;
        let clock = Instant::now();
        // axial momentum changed by the transverse projection
        let mut discrepancy = 0.0;
        for c in &mut self.channels {
            update_1d(&c.grid, &mut c.field, &c.fluxes, dt, &p, &format!("channel '{}'", c.id))?;
            for end in [ChannelEnd::Start, ChannelEnd::End] {
                if let EndLink::Zone { .. } = c.end(end) {
                    let k = c.grid.end_cell(end);
                    let before = c.field.cells[k];
                    c.field.cells[k] = project_transverse(before, self.numerics.transverse);
                    discrepancy += (c.field.cells[k].hu - before.hu).abs() * c.grid.lengths[k] * c.grid.width;
                }
            }
        }
        if discrepancy > 0.0 {
            log::debug!("step {}: transverse projection moved {discrepancy:.3e} m^4/s of axial momentum", self.step);
        }
        self.timings.channels_1d += clock.elapsed().as_secs_f64();
        let clock = Instant::now();
        for jz in &mut self.zones {
            step_junction(jz, dt, &p)?;
        }
        self.timings.junction_zones += clock.elapsed().as_secs_f64();
        if let Some((zone, field)) = &mut self.reference {
            let clock = Instant::now();
            if let Err(e) = update_2d(zone, field, dt, &p, "reference mesh") {
                // reference is not backed up per step: its failures are terminal
                return Err(e);
            }
            self.timings.reference_2d += clock.elapsed().as_secs_f64();
        }
        Ok(())
    }

    fn rollback(&mut self) {
        for c in &mut self.channels {
            if c.backup.len() == c.field.cells.len() {
                std::mem::swap(&mut c.field.cells, &mut c.backup);
            }
        }
        for (b, jz) in self.zone_backup.iter_mut().zip(&mut self.zones) {
            if b.len() == jz.field.cells.len() {
                std::mem::swap(&mut jz.field.cells, b);
            }
        }
    }

    fn sample_gauges(&mut self) {
        let clock = Instant::now();
        for g in &self.gauges {
            let (q, axis) = match &g.probe {
                Probe::Channel { channel, cell } => (self.channels[*channel].field.cells[*cell], None),
                Probe::Zone { zone, cell, axis } => (self.zones[*zone].field.cells[*cell], Some(*axis)),
                Probe::Reference { cell, axis } => {
                    (self.reference.as_ref().expect("reference probe").1.cells[*cell], Some(*axis))
                }
            };
            let u = match axis {
                None => q.hu / q.h,
                Some(Some(d)) => (q.hu * d.x + q.hv * d.y) / q.h,
                Some(None) => q.hu / q.h,
            };
            self.records.push(GaugeRecord { t: self.t, gauge_id: g.id.clone(), h: q.h, u });
        }
        self.timings.gauges += clock.elapsed().as_secs_f64();
    }

    pub fn snapshot(&self) -> Snapshot {
        let mut zones: Vec<(String, Vec<[f64; 3]>)> =
            self.zones.iter().map(|z| (z.label.clone(), fields_of(&z.field.cells))).collect();
        if let Some((_, f)) = &self.reference {
            zones.push(("reference".into(), fields_of(&f.cells)));
        }
        Snapshot {
            t: self.t,
            step: self.step,
            channels: self.channels.iter().map(|c| (c.id.clone(), fields_of(&c.field.cells))).collect(),
            zones,
        }
    }

    pub fn report(&self) -> RunReport {
        let final_volume = self.total_volume();
        RunReport {
            name: self.name.clone(),
            steps: self.step,
            t_final: self.t,
            gauges: self.records.clone(),
            initial_volume: self.initial_volume,
            final_volume,
            boundary_outflow: self.boundary_outflow,
            volume_error: (final_volume - (self.initial_volume - self.boundary_outflow)) / self.initial_volume,
            cells_1d: self.cells_1d(),
            cells_2d: self.cells_2d(),
            psfp_solves: self.psfp_solves,
            psfp_max_iterations: self.psfp_max_iterations,
            timings: self.timings.clone(),
        }
    }

    /// Step with the CFL rule until `t_end`, sampling gauges every `stride`
    /// steps and at the end.
    pub fn run(&mut self) -> std::result::Result<RunReport, Box<RunFailure>> {
        let start = Instant::now();
        while self.t < self.t_end {
            let step = self.compute_dt().and_then(|dt| self.advance(dt));
            if let Err(error) = step {
                self.timings.total += start.elapsed().as_secs_f64();
                log::error!("{}: {error}", self.name);
                return Err(Box::new(RunFailure { error, snapshot: self.snapshot(), report: self.report() }));
            }
            if self.step % self.stride == 0 || self.t >= self.t_end {
                self.sample_gauges();
            }
        }
        self.timings.total += start.elapsed().as_secs_f64();
        Ok(self.report())
    }

    /// Run a fixed number of steps of size `dt`, ignoring `t_end`.
    pub fn run_steps(&mut self, steps: usize, dt: f64) -> Result<()> {
        for _ in 0..steps {
            self.advance(dt)?;
        }
        Ok(())
    }
}

/// Build and run a scenario.
pub fn run(cfg: &ScenarioConfig) -> std::result::Result<RunReport, Box<RunFailure>> {
    let mut sim = Simulation::new(cfg).map_err(|error| {
        Box::new(RunFailure {
            error,
            snapshot: Snapshot { t: 0.0, step: 0, channels: vec![], zones: vec![] },
            report: RunReport {
                name: cfg.name.clone(),
                steps: 0,
                t_final: 0.0,
                gauges: vec![],
                initial_volume: 0.0,
                final_volume: 0.0,
                boundary_outflow: 0.0,
                volume_error: 0.0,
                cells_1d: 0,
                cells_2d: 0,
                psfp_solves: 0,
                psfp_max_iterations: 0,
                timings: Timings::default(),
            },
        })
    })?;
    sim.run()
}
