//! Scenario files: a JSON description of the network, initial state,
//! physics, numerics and outputs. Unknown keys are rejected.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Channel, ChannelNetwork, JunctionStrategy, Node, NodeKind, PatchSource, Point};
use crate::junctions::{CouplingMode, TransverseMode};
use crate::simulation::boundary::BoundaryCondition;
use crate::swe::PhysicalParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Metadata::is_empty")]
    pub metadata: Metadata,
    pub nodes: Vec<NodeConfig>,
    pub channels: Vec<ChannelConfig>,
    pub initial: InitialConfig,
    #[serde(default)]
    pub physics: PhysicsConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
    pub outputs: OutputConfig,
    /// Directory that relative mesh paths are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

/// Free-form provenance notes. `assumed` lists every number that was
/// reconstructed rather than taken from a source.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assumed: Vec<String>,
}

impl Metadata {
    fn is_empty(&self) -> bool {
        self.description.is_empty() && self.assumed.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeConfig {
    pub id: String,
    pub x: f64,
    pub y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundaryCondition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub junction: Option<JunctionConfig>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyName {
    MethodA,
    MethodB,
    Psfp,
}

impl StrategyName {
    pub fn parse(s: &str) -> Option<StrategyName> {
        match s {
            "method_a" | "a" => Some(StrategyName::MethodA),
            "method_b" | "b" => Some(StrategyName::MethodB),
            "psfp" => Some(StrategyName::Psfp),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyName::MethodA => "method_a",
            StrategyName::MethodB => "method_b",
            StrategyName::Psfp => "psfp",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JunctionConfig {
    pub strategy: StrategyName,
    /// Generated Method B patch.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patch: Option<PatchConfig>,
    /// Method B patch read from a mesh file instead.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh_file: Option<String>,
    /// Patch reach into each channel beyond its mouth [m]; defaults to the
    /// widest channel width.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchConfig {
    pub element_size: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub id: String,
    pub from: String,
    pub to: String,
    pub width: f64,
    pub cells: usize,
}

/// Depth and axial velocity (along the channel from `from` to `to`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowState {
    pub h: f64,
    #[serde(default)]
    pub u: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub from_s: f64,
    pub to_s: f64,
    pub h: f64,
    #[serde(default)]
    pub u: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelInitial {
    pub channel: String,
    pub segments: Vec<Segment>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JunctionInitial {
    pub node: String,
    pub h: f64,
    #[serde(default)]
    pub u: f64,
    #[serde(default)]
    pub v: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub default: FlowState,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub channels: Vec<ChannelInitial>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub junctions: Vec<JunctionInitial>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    #[serde(default = "default_g")]
    pub g: f64,
    #[serde(default)]
    pub manning_n: f64,
    #[serde(default)]
    pub friction: bool,
}

fn default_g() -> f64 {
    9.81
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        PhysicsConfig { g: default_g(), manning_n: 0.0, friction: false }
    }
}

impl PhysicsConfig {
    pub fn params(&self) -> PhysicalParams {
        PhysicalParams { g: self.g, manning_n: self.manning_n, friction_enabled: self.friction }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    /// 1D channels coupled through their junction treatments.
    #[default]
    Network,
    /// The whole footprint on one unstructured 2D mesh.
    Reference,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element_size: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh_file: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsConfig {
    #[serde(default = "default_order")]
    pub order: u8,
    #[serde(default = "default_cfl")]
    pub cfl_1d: f64,
    #[serde(default)]
    pub coupling: CouplingMode,
    #[serde(default)]
    pub transverse: TransverseMode,
    /// Junction element protrusion into each channel, as a fraction of its width.
    #[serde(default = "default_protrusion")]
    pub protrusion: f64,
    #[serde(default)]
    pub mode: RunMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceConfig>,
}

fn default_order() -> u8 {
    2
}
fn default_cfl() -> f64 {
    0.9
}
fn default_protrusion() -> f64 {
    0.1
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            order: default_order(),
            cfl_1d: default_cfl(),
            coupling: CouplingMode::default(),
            transverse: TransverseMode::default(),
            protrusion: default_protrusion(),
            mode: RunMode::Network,
            reference: None,
        }
    }
}

/// Gauge at a channel station (`channel` + `s`) or at a point (`x`, `y`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeConfig {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
}

impl GaugeConfig {
    pub fn on_channel(id: &str, channel: &str, s: f64) -> Self {
        GaugeConfig { id: id.into(), channel: Some(channel.into()), s: Some(s), x: None, y: None }
    }

    pub fn at_point(id: &str, x: f64, y: f64) -> Self {
        GaugeConfig { id: id.into(), channel: None, s: None, x: Some(x), y: Some(y) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub t_end: f64,
    /// Record gauges every `stride` steps (and always at the start and end).
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default)]
    pub gauges: Vec<GaugeConfig>,
}

fn default_stride() -> usize {
    1
}

impl ScenarioConfig {
    /// Parse and validate a JSON scenario.
    pub fn from_json(text: &str) -> Result<ScenarioConfig> {
        let cfg: ScenarioConfig = serde_json::from_str(text)
            .map_err(|e| Error::ConfigParse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Semantic checks; every problem found is reported.
    pub fn validate(&self) -> Result<()> {
        let errs = self.problems();
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::ConfigInvalid(errs))
        }
    }

    fn problems(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let mut ids = HashSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id.as_str()) {
                errs.push(format!("duplicate node id '{}'", n.id));
            }
            if !(n.x.is_finite() && n.y.is_finite()) {
                errs.push(format!("node '{}': coordinates must be finite", n.id));
            }
            match (&n.boundary, &n.junction) {
                (Some(bc), None) => {
                    if let Err(e) = bc.validate() {
                        errs.push(format!("node '{}': {e}", n.id));
                    }
                }
                (None, Some(j)) => errs.extend(self.junction_problems(&n.id, j)),
                _ => errs.push(format!("node '{}' must have exactly one of 'boundary' or 'junction'", n.id)),
            }
        }
        let mut ch_ids = HashSet::new();
        for c in &self.channels {
            if !ch_ids.insert(c.id.as_str()) {
                errs.push(format!("duplicate channel id '{}'", c.id));
            }
            for (what, id) in [("from", &c.from), ("to", &c.to)] {
                if !ids.contains(id.as_str()) {
                    errs.push(format!("channel '{}': {what} references unknown node '{id}'", c.id));
                }
            }
        }
        let fs = &self.initial.default;
        if !(fs.h > 0.0 && fs.h.is_finite() && fs.u.is_finite()) {
            errs.push("initial default state needs h > 0 and finite u".into());
        }
        for ci in &self.initial.channels {
            match self.channels.iter().find(|c| c.id == ci.channel) {
                None => errs.push(format!("initial state references unknown channel '{}'", ci.channel)),
                Some(_) => {
                    for s in &ci.segments {
                        if !(s.h > 0.0 && s.h.is_finite() && s.u.is_finite() && s.from_s <= s.to_s) {
                            errs.push(format!("initial segment on '{}' is invalid", ci.channel));
                        }
                    }
                }
            }
        }
        for ji in &self.initial.junctions {
            if !self.nodes.iter().any(|n| n.id == ji.node && n.junction.is_some()) {
                errs.push(format!("initial state references unknown junction '{}'", ji.node));
            }
            if !(ji.h > 0.0 && ji.h.is_finite()) {
                errs.push(format!("initial state of junction '{}' needs h > 0", ji.node));
            }
        }
        if let Err(e) = self.physics.params().validate() {
            errs.push(e);
        }
        let nm = &self.numerics;
        if nm.order != 1 && nm.order != 2 {
            errs.push(format!("numerics.order must be 1 or 2, got {}", nm.order));
        }
        if !(nm.cfl_1d > 0.0 && nm.cfl_1d <= 1.0) {
            errs.push(format!("numerics.cfl_1d must be in (0, 1], got {}", nm.cfl_1d));
        }
        if nm.mode == RunMode::Reference {
            match &nm.reference {
                Some(ReferenceConfig { element_size: Some(h), mesh_file: None }) if *h > 0.0 => {}
                Some(ReferenceConfig { element_size: None, mesh_file: Some(f) }) => {
                    if !self.resolve(f).exists() {
                        errs.push(format!("reference mesh file '{f}' not found"));
                    }
                }
                _ => errs.push("reference mode needs numerics.reference with a positive element_size or a mesh_file".into()),
            }
        }
        let out = &self.outputs;
        if !(out.t_end >= 0.0 && out.t_end.is_finite()) {
            errs.push(format!("outputs.t_end must be finite and non-negative, got {}", out.t_end));
        }
        if out.stride == 0 {
            errs.push("outputs.stride must be at least 1".into());
        }
        let mut gauge_ids = HashSet::new();
        for g in &out.gauges {
            if !gauge_ids.insert(g.id.as_str()) {
                errs.push(format!("duplicate gauge id '{}'", g.id));
            }
            match (&g.channel, g.s, g.x, g.y) {
                (Some(c), Some(s), None, None) => match self.channels.iter().find(|ch| &ch.id == c) {
                    None => errs.push(format!("gauge '{}' references unknown channel '{c}'", g.id)),
                    Some(ch) => {
                        if let Some(len) = self.channel_length(ch) {
                            if !(0.0..=len).contains(&s) {
                                errs.push(format!("gauge '{}': s = {s} outside channel '{c}' (length {len})", g.id));
                            }
                        }
                    }
                },
                (None, None, Some(x), Some(y)) if x.is_finite() && y.is_finite() => {}
                _ => errs.push(format!("gauge '{}' needs either channel + s or x + y", g.id)),
            }
        }
        if errs.is_empty() {
            if let Ok(net) = self.network() {
                errs.extend(net.validate());
            }
        }
        errs
    }

    fn junction_problems(&self, id: &str, j: &JunctionConfig) -> Vec<String> {
        let mut errs = Vec::new();
        match j.strategy {
            StrategyName::MethodB => match (&j.patch, &j.mesh_file) {
                (Some(p), None) => {
                    if !(p.element_size > 0.0 && p.element_size.is_finite()) {
                        errs.push(format!("junction '{id}': patch element_size must be positive"));
                    }
                }
                (None, Some(f)) => {
                    if !self.resolve(f).exists() {
                        errs.push(format!("junction '{id}': mesh file '{f}' not found"));
                    }
                }
                _ => errs.push(format!("junction '{id}': method_b needs exactly one of 'patch' or 'mesh_file'")),
            },
            _ => {
                if j.patch.is_some() || j.mesh_file.is_some() {
                    errs.push(format!("junction '{id}': patch settings only apply to method_b"));
                }
            }
        }
        if let Some(e) = j.extension {
            if !(e > 0.0 && e.is_finite()) {
                errs.push(format!("junction '{id}': extension must be positive"));
            }
        }
        errs
    }

    fn channel_length(&self, ch: &ChannelConfig) -> Option<f64> {
        let a = self.nodes.iter().find(|n| n.id == ch.from)?;
        let b = self.nodes.iter().find(|n| n.id == ch.to)?;
        Some(Point::new(a.x, a.y).distance(Point::new(b.x, b.y)))
    }

    /// Resolve a path from the config against its directory.
    pub fn resolve(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        match &self.base_dir {
            Some(d) if p.is_relative() => d.join(p),
            _ => p.to_path_buf(),
        }
    }

    /// Build the network description. Assumes basic reference checks passed.
    pub fn network(&self) -> Result<ChannelNetwork> {
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let kind = match (&n.boundary, &n.junction) {
                (Some(bc), _) => NodeKind::Boundary(bc.clone()),
                (None, Some(j)) => NodeKind::Junction(self.strategy_for(n, j)),
                (None, None) => return Err(Error::ConfigInvalid(vec![format!("node '{}' has no kind", n.id)])),
            };
            nodes.push(Node { id: n.id.clone(), position: Point::new(n.x, n.y), kind });
        }
        let find = |id: &str| {
            self.nodes
                .iter()
                .position(|n| n.id == id)
                .ok_or_else(|| Error::ConfigInvalid(vec![format!("unknown node '{id}'")]))
        };
        let mut channels = Vec::with_capacity(self.channels.len());
        for c in &self.channels {
            let (from, to) = (find(&c.from)?, find(&c.to)?);
            channels.push(Channel {
                id: c.id.clone(),
                width: c.width,
                cell_count: c.cells,
                from,
                to,
                start: nodes[from].position,
                end: nodes[to].position,
            });
        }
        Ok(ChannelNetwork { nodes, channels, protrusion: self.numerics.protrusion })
    }

    fn strategy_for(&self, n: &NodeConfig, j: &JunctionConfig) -> JunctionStrategy {
        match j.strategy {
            StrategyName::MethodA => JunctionStrategy::MethodA,
            StrategyName::Psfp => JunctionStrategy::Psfp,
            StrategyName::MethodB => {
                let widest = self
                    .channels
                    .iter()
                    .filter(|c| c.from == n.id || c.to == n.id)
                    .map(|c| c.width)
                    .fold(0.0, f64::max);
                let extension = j.extension.unwrap_or(widest);
                match (&j.patch, &j.mesh_file) {
                    (_, Some(f)) => JunctionStrategy::MethodB(PatchSource::MeshFile { path: self.resolve(f), extension }),
                    (Some(p), None) => JunctionStrategy::MethodB(PatchSource::Generated { element_size: p.element_size, extension }),
                    // validation rejects this; fall back to a patch one tenth of the width
                    (None, None) => JunctionStrategy::MethodB(PatchSource::Generated { element_size: 0.1 * widest, extension }),
                }
            }
        }
    }

    /// Use `strategy` at every junction. A Method B junction gets a patch
    /// with `element_size` unless it already has one.
    pub fn with_strategy(mut self, strategy: StrategyName, element_size: f64) -> Self {
        for n in &mut self.nodes {
            if let Some(j) = &mut n.junction {
                j.strategy = strategy;
                if strategy == StrategyName::MethodB {
                    if j.patch.is_none() && j.mesh_file.is_none() {
                        j.patch = Some(PatchConfig { element_size });
                    }
                } else {
                    j.patch = None;
                    j.mesh_file = None;
                }
            }
        }
        self.numerics.mode = RunMode::Network;
        self
    }

    /// Switch to the 2D reference solver on a generated mesh.
    pub fn as_reference(mut self, element_size: f64) -> Self {
        self.numerics.mode = RunMode::Reference;
        self.numerics.reference = Some(ReferenceConfig { element_size: Some(element_size), mesh_file: None });
        self
    }

    pub fn junction_ids(&self) -> Vec<&str> {
        self.nodes.iter().filter(|n| n.junction.is_some()).map(|n| n.id.as_str()).collect()
    }
}

/// Read, parse and validate a scenario file. Relative mesh paths are taken
/// relative to the file.
pub fn parse_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut cfg: ScenarioConfig = serde_json::from_str(&text)
        .map_err(|e| Error::ConfigParse(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column())))?;
    cfg.base_dir = path.parent().map(Path::to_path_buf);
    cfg.validate()?;
    Ok(cfg)
}
