//! Built-in scenarios: single bifurcations with waves and shocks, a dam-break
//! bend, a multiple-junction network, the star-state angle tests and the
//! grid-study configuration.
//!
//! The source gives geometry mostly as figures, so each preset lists the
//! numbers it had to reconstruct in `metadata.assumed`.

use std::f64::consts::PI;

use crate::config::{
    ChannelConfig, ChannelInitial, FlowState, GaugeConfig, InitialConfig, JunctionConfig, Metadata, NodeConfig,
    NumericsConfig, OutputConfig, PatchConfig, PhysicsConfig, ReferenceConfig, RunMode, ScenarioConfig, Segment,
    StrategyName,
};
use crate::error::{Error, Result};
use crate::simulation::boundary::{BoundaryCondition, InflowFunction};

/// Name and one-line description of every preset.
pub const PRESETS: &[(&str, &str)] = &[
    ("test1_sub90", "subcritical wave through a symmetric 90 degree bifurcation"),
    ("test2_asym90", "subcritical wave through an asymmetric 90 degree bifurcation"),
    ("test3_shock45", "Fr = 0.75 shock through a symmetric 45 degree bifurcation"),
    ("test4_super90", "supercritical Fr = 1.135 shock through a symmetric 90 degree bifurcation"),
    ("test5_cadam", "dam break into a channel with a 45 degree bend"),
    ("test6_network", "subcritical wave through a 16-junction, 25-channel network"),
    ("test6_network_shock", "supercritical shock through the 16-junction network"),
    ("appA_angles", "star-state wave test, 15 degree bifurcation"),
    ("appA_angles_0", "star-state wave test, parallel daughters"),
    ("appA_angles_15", "star-state wave test, 15 degree bifurcation"),
    ("appA_angles_45", "star-state wave test, 45 degree bifurcation"),
    ("appA_angles_90", "star-state wave test, 90 degree bifurcation"),
    ("appB_gridstudy", "2D reference run of a shock entering a 45 degree bifurcation"),
];

/// Still depth ahead of every wave and shock [m].
pub const H0: f64 = 0.16;

const G: f64 = 9.81;

/// Look up a preset by name.
pub fn preset(name: &str) -> Result<ScenarioConfig> {
    let wave = Forcing::Wave { amplitude: 0.4 };
    let cfg = match name {
        "test1_sub90" => bifurcation(name, &Bifurcation::symmetric(PI / 2.0), Forcing::Wave { amplitude: wave_amplitude(0.4) }, 8.0),
        "test2_asym90" => bifurcation(name, &Bifurcation::asymmetric(PI / 2.0), Forcing::Wave { amplitude: wave_amplitude(0.4) }, 8.0),
        "test3_shock45" => bifurcation(name, &Bifurcation::symmetric(PI / 4.0), Forcing::Shock { froude: 0.75 }, 2.0),
        "test4_super90" => bifurcation(name, &Bifurcation::symmetric(PI / 2.0), Forcing::Shock { froude: 1.135 }, 2.0),
        "test5_cadam" => cadam(),
        "test6_network" => network(name, wave, 20.0),
        "test6_network_shock" => network(name, Forcing::Shock { froude: 1.135 }, 12.0),
        "appA_angles" | "appA_angles_15" => angle_test(name, 15.0),
        "appA_angles_0" => angle_test(name, 0.0),
        "appA_angles_45" => angle_test(name, 45.0),
        "appA_angles_90" => angle_test(name, 90.0),
        "appB_gridstudy" => grid_study(),
        _ => return Err(Error::UnknownPreset(name.into())),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Post-shock state `(h, u)` of a bore moving into still water of depth
/// `h_right` whose flow behind the front has Froude number `froude`.
pub fn bore_state(h_right: f64, froude: f64, g: f64) -> (f64, f64) {
    // Fr behind the bore as a function of the depth ratio r = h_l / h_r
    let fr = |r: f64| (1.0 - 1.0 / r) * (0.5 * (r + 1.0)).sqrt();
    let (mut lo, mut hi) = (1.0, 2.0);
    while fr(hi) < froude {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if fr(mid) < froude {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let h = 0.5 * (lo + hi) * h_right;
    (h, froude * (g * h).sqrt())
}

/// Inflow velocity amplitude for which a simple wave entering still water
/// of depth `H0` peaks at Froude number `froude` (from `u = 2 (c - c0)`).
pub fn wave_amplitude(froude: f64) -> f64 {
    let c0 = (G * H0).sqrt();
    froude * c0 / (1.0 - 0.5 * froude)
}

/// Incoming disturbance at the parent channel's upstream end.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Forcing {
    /// `u(t) = amplitude · exp(-(t - 3)^2 / 2)` on still water.
    Wave { amplitude: f64 },
    /// A bore already inside the parent channel, fed by its post-shock state.
    Shock { froude: f64 },
}

/// A single three-way junction at the origin; the parent channel arrives
/// along +x.
#[derive(Clone, Debug, PartialEq)]
pub struct Bifurcation {
    pub parent_width: f64,
    pub daughter_widths: [f64; 2],
    /// Daughter axis angles from +x [rad].
    pub angles: [f64; 2],
    pub lengths: [f64; 3],
    /// Target 1D cell size [m].
    pub dx: f64,
    /// Method B patch element size [m].
    pub patch_size: f64,
}

impl Bifurcation {
    /// Daughters at ±`theta` from the parent axis.
    pub fn symmetric(theta: f64) -> Bifurcation {
        Bifurcation {
            parent_width: 0.4,
            daughter_widths: [0.2, 0.2],
            angles: [theta, -theta],
            lengths: [4.0, 4.0, 4.0],
            dx: 0.05,
            patch_size: 0.05,
        }
    }

    /// One daughter at `theta`, the other continuing straight on.
    pub fn asymmetric(theta: f64) -> Bifurcation {
        Bifurcation { angles: [theta, 0.0], ..Bifurcation::symmetric(theta) }
    }
}

fn cells(len: f64, dx: f64) -> usize {
    ((len / dx).round() as usize).max(2)
}

fn boundary(id: &str, x: f64, y: f64, bc: BoundaryCondition) -> NodeConfig {
    NodeConfig { id: id.into(), x, y, boundary: Some(bc), junction: None }
}

fn junction(id: &str, x: f64, y: f64) -> NodeConfig {
    NodeConfig {
        id: id.into(),
        x,
        y,
        boundary: None,
        junction: Some(JunctionConfig { strategy: StrategyName::MethodA, patch: None, mesh_file: None, extension: None }),
    }
}

fn channel(id: &str, from: &str, to: &str, width: f64, cells: usize) -> ChannelConfig {
    ChannelConfig { id: id.into(), from: from.into(), to: to.into(), width, cells }
}

fn pulse(amplitude: f64) -> BoundaryCondition {
    BoundaryCondition::Inflow(InflowFunction::Gaussian { amplitude, t0: 3.0, sigma: 1.0 })
}

fn still() -> InitialConfig {
    InitialConfig { default: FlowState { h: H0, u: 0.0 }, channels: vec![], junctions: vec![] }
}

/// Inflow condition and initial state for `forcing` entering `channel`; a
/// shock front starts at `front`.
fn forcing_setup(forcing: Forcing, channel: &str, front: f64) -> (BoundaryCondition, InitialConfig, Vec<String>) {
    match forcing {
        Forcing::Wave { amplitude } => (
            pulse(amplitude),
            still(),
            vec![format!("still depth {H0} m"), format!("inflow pulse u(t) = {amplitude:.4} exp(-(t-3)^2/2)")],
        ),
        Forcing::Shock { froude } => {
            let (h, u) = bore_state(H0, froude, G);
            let mut init = still();
            init.channels.push(ChannelInitial {
                channel: channel.into(),
                segments: vec![Segment { from_s: 0.0, to_s: front, h, u }],
            });
            (
                BoundaryCondition::Prescribed { h, u },
                init,
                vec![
                    format!("still depth {H0} m ahead of the shock"),
                    format!("post-shock state h = {h:.5} m, u = {u:.5} m/s from the bore relations"),
                    format!("shock front starts {front} m from the upstream end"),
                ],
            )
        }
    }
}

/// Single-junction scenario with gauges in the middle and near the junction
/// of each channel.
pub fn bifurcation(name: &str, b: &Bifurcation, forcing: Forcing, t_end: f64) -> ScenarioConfig {
    let [l1, l2, l3] = b.lengths;
    let p2 = (l2 * b.angles[0].cos(), l2 * b.angles[0].sin());
    let p3 = (l3 * b.angles[1].cos(), l3 * b.angles[1].sin());
    let front = l1 - 1.0;
    let (inflow, initial, mut assumed) = forcing_setup(forcing, "ch1", front);
    assumed.extend([
        format!("channel widths {} / {} / {} m", b.parent_width, b.daughter_widths[0], b.daughter_widths[1]),
        format!("channel lengths {l1} / {l2} / {l3} m"),
        "transparent daughter outlets".into(),
        format!("1D cell size {} m, patch element size {} m", b.dx, b.patch_size),
    ]);
    let mut gauges = Vec::new();
    for (ch, len, near_junction_at_end) in [("ch1", l1, true), ("ch2", l2, false), ("ch3", l3, false)] {
        let near = if near_junction_at_end { len - 0.5 } else { 0.5 };
        gauges.push(GaugeConfig::on_channel(&format!("{ch}_mid"), ch, 0.5 * len));
        gauges.push(GaugeConfig::on_channel(&format!("{ch}_near"), ch, near));
    }
    let mut j = junction("j", 0.0, 0.0);
    if let Some(jc) = &mut j.junction {
        jc.extension = Some(b.parent_width);
    }
    ScenarioConfig {
        name: name.into(),
        metadata: Metadata { description: describe(name), assumed },
        nodes: vec![
            boundary("in", -l1, 0.0, inflow),
            j,
            boundary("out2", p2.0, p2.1, BoundaryCondition::Transparent),
            boundary("out3", p3.0, p3.1, BoundaryCondition::Transparent),
        ],
        channels: vec![
            channel("ch1", "in", "j", b.parent_width, cells(l1, b.dx)),
            channel("ch2", "j", "out2", b.daughter_widths[0], cells(l2, b.dx)),
            channel("ch3", "j", "out3", b.daughter_widths[1], cells(l3, b.dx)),
        ],
        initial,
        physics: PhysicsConfig::default(),
        numerics: NumericsConfig::default(),
        outputs: OutputConfig { t_end, stride: 1, gauges },
        base_dir: None,
    }
}

fn describe(name: &str) -> String {
    PRESETS.iter().find(|p| p.0 == name).map(|p| p.1.to_string()).unwrap_or_default()
}

fn angle_test(name: &str, degrees: f64) -> ScenarioConfig {
    let mut b = Bifurcation::symmetric(degrees.to_radians());
    let mut drawn = degrees;
    if degrees == 0.0 {
        // coincident daughter axes cannot be drawn; the star-state solve does
        // not see the angle, so only the 2D footprint differs
        drawn = 5.0;
        b.angles = [drawn.to_radians(), -drawn.to_radians()];
    }
    b.lengths = [5.0, 5.0, 5.0];
    let mut cfg = bifurcation(name, &b, Forcing::Wave { amplitude: 0.4 }, 8.0);
    cfg = cfg.with_strategy(StrategyName::Psfp, b.patch_size);
    if degrees == 0.0 {
        cfg.metadata.assumed.push(format!("parallel daughters drawn at ±{drawn} degrees for 2D runs"));
    }
    cfg
}

fn grid_study() -> ScenarioConfig {
    let mut b = Bifurcation::symmetric(PI / 4.0);
    b.daughter_widths = [0.4, 0.4];
    b.lengths = [3.0, 3.0, 3.0];
    let mut cfg = bifurcation("appB_gridstudy", &b, Forcing::Shock { froude: 0.75 }, 2.0);
    cfg.numerics.mode = RunMode::Reference;
    cfg.numerics.reference = Some(ReferenceConfig { element_size: Some(0.16), mesh_file: None });
    // the designated gauge comes first: 0.5 m upstream of the junction, where
    // the reflected wave is recorded; daughter gauges sit in the separated
    // flow downstream of the corners
    cfg.outputs.gauges.retain(|g| g.id == "ch1_near" || g.id == "ch2_mid");
    cfg.metadata.assumed.push("designated gauge 0.5 m upstream of the junction".into());
    cfg
}

/// Reservoir and straight reach, 45 degree bend, second reach.
fn cadam() -> ScenarioConfig {
    let width = 0.495;
    let (res_len, res_width) = (2.39, 2.44);
    // reservoir volume held by a channel-width reach
    let res_eq = res_len * res_width / width;
    let (reach1, reach2) = (4.0, 4.0);
    let dx = 0.05;
    let up = res_eq + reach1;
    let a = -PI / 4.0;
    let outlet = (reach2 * a.cos(), reach2 * a.sin());
    let mut j = junction("bend", 0.0, 0.0);
    if let Some(jc) = &mut j.junction {
        jc.extension = Some(width);
    }
    let mut gauges = vec![
        GaugeConfig::on_channel("G2", "upstream", res_eq - 0.5),
        GaugeConfig::on_channel("G3", "upstream", res_eq + 1.0),
        GaugeConfig::on_channel("G4", "upstream", res_eq + 3.0),
    ];
    // across the bend, normal to the mean flow direction
    let n = (-(0.5 * a).sin(), (0.5 * a).cos());
    for (id, off) in [("G5", 0.15), ("G6", 0.0), ("G7", -0.15)] {
        gauges.push(GaugeConfig::at_point(id, off * n.0, off * n.1));
    }
    gauges.push(GaugeConfig::on_channel("G8", "downstream", 1.0));
    gauges.push(GaugeConfig::on_channel("G9", "downstream", 3.0));
    ScenarioConfig {
        name: "test5_cadam".into(),
        metadata: Metadata {
            description: describe("test5_cadam"),
            assumed: vec![
                format!("reservoir {res_len} x {res_width} m held by a {res_eq:.3} m reach of the channel width"),
                format!("channel width {width} m, reaches of {reach1} m and {reach2} m around the bend"),
                "reservoir depth 0.25 m over a flat bed; the reservoir step is not represented".into(),
                "downstream bed wetted to 0.01 m".into(),
                "gauge stations chosen along the axis and across the bend".into(),
                format!("1D cell size {dx} m"),
            ],
        },
        nodes: vec![
            boundary("back", -up, 0.0, BoundaryCondition::Reflective),
            j,
            boundary("outlet", outlet.0, outlet.1, BoundaryCondition::Transparent),
        ],
        channels: vec![
            channel("upstream", "back", "bend", width, cells(up, dx)),
            channel("downstream", "bend", "outlet", width, cells(reach2, dx)),
        ],
        initial: InitialConfig {
            default: FlowState { h: 0.01, u: 0.0 },
            channels: vec![ChannelInitial {
                channel: "upstream".into(),
                segments: vec![Segment { from_s: 0.0, to_s: res_eq, h: 0.25, u: 0.0 }],
            }],
            junctions: vec![],
        },
        physics: PhysicsConfig::default(),
        numerics: NumericsConfig::default(),
        outputs: OutputConfig { t_end: 20.0, stride: 1, gauges },
        base_dir: None,
    }
}

/// Octagonal ladder ring: 8 outer and 8 inner junctions joined by rungs,
/// with one outer ring channel replaced by the inflow and outflow channels.
/// Every junction has exactly three channels.
pub fn network(name: &str, forcing: Forcing, t_end: f64) -> ScenarioConfig {
    let (r_out, r_in) = (6.0, 3.0);
    let width = 0.2;
    let dx = 0.1;
    let feed = 3.0;
    let step = PI / 4.0;
    // gap of the outer ring centred on -y
    let angle = |k: usize| -PI / 2.0 + step * (k as f64 + 0.5);
    let at = |r: f64, k: usize| (r * angle(k).cos(), r * angle(k).sin());
    let mut nodes = Vec::new();
    for k in 0..8 {
        let (x, y) = at(r_out, k);
        nodes.push(junction(&format!("o{k}"), x, y));
        let (x, y) = at(r_in, k);
        nodes.push(junction(&format!("i{k}"), x, y));
    }
    let (o0, o7) = (at(r_out, 0), at(r_out, 7));
    nodes.push(boundary("in", o0.0, o0.1 - feed, BoundaryCondition::Transparent));
    nodes.push(boundary("out", o7.0, o7.1 - feed, BoundaryCondition::Transparent));
    let mut chans = Vec::new();
    let len = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
    chans.push(channel("feed", "in", "o0", width, cells(feed, dx)));
    for k in 0..7 {
        chans.push(channel(&format!("outer{k}"), &format!("o{k}"), &format!("o{}", k + 1), width, cells(len(at(r_out, k), at(r_out, k + 1)), dx)));
    }
    for k in 0..8 {
        chans.push(channel(&format!("inner{k}"), &format!("i{k}"), &format!("i{}", (k + 1) % 8), width, cells(len(at(r_in, k), at(r_in, k + 1)), dx)));
        chans.push(channel(&format!("rung{k}"), &format!("o{k}"), &format!("i{k}"), width, cells(r_out - r_in, dx)));
    }
    chans.push(channel("drain", "o7", "out", width, cells(feed, dx)));
    let (inflow, initial, mut assumed) = forcing_setup(forcing, "feed", 1.0);
    if let Some(n) = nodes.iter_mut().find(|n| n.id == "in") {
        n.boundary = Some(inflow);
    }
    assumed.extend([
        format!("ladder ring of radii {r_out} m and {r_in} m with one outer link opened"),
        format!("all channels {width} m wide"),
        format!("feed and drain channels {feed} m long, transparent outlet"),
        format!("1D cell size {dx} m, patch element size 0.05 m"),
        "gauge points at channel midpoints spread around the ring".into(),
    ]);
    let picks = ["feed", "outer1", "rung2", "inner3", "outer3", "rung5", "inner6", "drain"];
    let gauges = picks
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let ch = chans.iter().find(|ch| ch.id == *c).expect("gauge channel");
            let from = nodes.iter().find(|n| n.id == ch.from).expect("node");
            let to = nodes.iter().find(|n| n.id == ch.to).expect("node");
            let l = ((to.x - from.x).powi(2) + (to.y - from.y).powi(2)).sqrt();
            GaugeConfig::on_channel(&format!("P{}", i + 1), c, 0.5 * l)
        })
        .collect();
    for n in &mut nodes {
        if let Some(j) = &mut n.junction {
            j.extension = Some(width);
        }
    }
    ScenarioConfig {
        name: name.into(),
        metadata: Metadata { description: describe(name), assumed },
        nodes,
        channels: chans,
        initial,
        physics: PhysicsConfig { friction: false, ..PhysicsConfig::default() },
        numerics: NumericsConfig::default(),
        outputs: OutputConfig { t_end, stride: 1, gauges },
        base_dir: None,
    }
}

/// Method B patch element size used when a preset is switched to Method B:
/// a quarter of the narrowest channel.
pub fn default_patch_size(cfg: &ScenarioConfig) -> f64 {
    0.25 * cfg.channels.iter().map(|c| c.width).fold(f64::INFINITY, f64::min)
}

/// `cfg` with every junction using `strategy`.
pub fn with_method(cfg: ScenarioConfig, strategy: StrategyName) -> ScenarioConfig {
    let es = default_patch_size(&cfg);
    cfg.with_strategy(strategy, es)
}

/// `cfg` regridded to 1D cells of about `dx` and Method B patches of
/// element size `dx`.
pub fn with_cell_size(mut cfg: ScenarioConfig, dx: f64) -> ScenarioConfig {
    let pos = |id: &str| cfg.nodes.iter().find(|n| n.id == id).map(|n| (n.x, n.y));
    let lens: Vec<Option<f64>> = cfg
        .channels
        .iter()
        .map(|c| Some(((pos(&c.to)?.0 - pos(&c.from)?.0).powi(2) + (pos(&c.to)?.1 - pos(&c.from)?.1).powi(2)).sqrt()))
        .collect();
    for (c, len) in cfg.channels.iter_mut().zip(lens) {
        if let Some(len) = len {
            c.cells = cells(len, dx);
        }
    }
    for n in &mut cfg.nodes {
        if let Some(PatchConfig { element_size }) = n.junction.as_mut().and_then(|j| j.patch.as_mut()) {
            *element_size = dx;
        }
    }
    cfg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::swe::froude;

    #[test]
    fn every_preset_validates() {
        for (name, _) in PRESETS {
            let cfg = preset(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(cfg.name, *name);
            assert!(!cfg.metadata.assumed.is_empty(), "{name} lists no assumptions");
            for s in [StrategyName::MethodA, StrategyName::MethodB] {
                with_method(cfg.clone(), s).validate().unwrap();
            }
        }
        assert!(preset("test7").is_err());
    }

    #[test]
    fn bore_satisfies_jump_conditions() {
        for fr in [0.75, 1.135] {
            let (h, u) = bore_state(H0, fr, G);
            // independent check: mass and momentum balance across the front
            let s = h * u / (h - H0);
            let mass = s * (h - H0) - h * u;
            let mom = s * h * u - (h * u * u + 0.5 * G * (h * h - H0 * H0));
            assert!(mass.abs() < 1e-12 && mom.abs() < 1e-10, "{fr}: {mass} {mom}");
            let q = crate::swe::Conserved1DState::from_primitive(h, u);
            assert!((froude(q, &crate::swe::PhysicalParams::default()).unwrap() - fr).abs() < 1e-12);
        }
    }

    #[test]
    fn test4_shock_is_supercritical() {
        let cfg = preset("test4_super90").unwrap();
        let seg = &cfg.initial.channels[0].segments[0];
        assert!((seg.u / (G * seg.h).sqrt() - 1.135).abs() < 1e-9);
    }

    #[test]
    fn wave_presets_use_the_pulse() {
        let cfg = preset("appA_angles").unwrap();
        let bc = cfg.nodes.iter().find(|n| n.id == "in").unwrap().boundary.clone().unwrap();
        assert_eq!(bc, pulse(0.4));
        assert_eq!(cfg.initial.default.h, 0.16);
        match bc {
            BoundaryCondition::Inflow(f) => assert!((f.eval(3.0) - 0.4).abs() < 1e-15),
            _ => unreachable!(),
        }
    }

    #[test]
    fn simple_wave_amplitude_gives_target_froude() {
        let a = wave_amplitude(0.4);
        let c = (G * H0).sqrt() + 0.5 * a;
        assert!((a / c - 0.4).abs() < 1e-12);
    }

    #[test]
    fn network_has_16_three_way_junctions() {
        let cfg = preset("test6_network").unwrap();
        assert!(!cfg.physics.friction);
        let net = cfg.network().unwrap();
        let js: Vec<usize> = (0..net.nodes.len()).filter(|&n| cfg.nodes[n].junction.is_some()).collect();
        assert_eq!(js.len(), 16);
        assert_eq!(net.channels.len(), 25);
        assert!(js.iter().all(|&n| net.incident(n).len() == 3));
        with_method(cfg, StrategyName::Psfp).validate().unwrap();
    }
}
