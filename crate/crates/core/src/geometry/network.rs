use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::junction::JunctionArm;
use super::Point;
use crate::simulation::boundary::BoundaryCondition;

/// Which end of a channel a node sits at. The positive `s` direction runs
/// from `Start` to `End`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelEnd {
    Start,
    End,
}

impl ChannelEnd {
    /// Orientation of the outward normal of the 1D domain relative to `+s`.
    pub fn outward_sign(self) -> f64 {
        match self {
            ChannelEnd::Start => -1.0,
            ChannelEnd::End => 1.0,
        }
    }

    pub fn other(self) -> ChannelEnd {
        match self {
            ChannelEnd::Start => ChannelEnd::End,
            ChannelEnd::End => ChannelEnd::Start,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ChannelEnd::Start => "start",
            ChannelEnd::End => "end",
        }
    }

    pub fn parse(s: &str) -> Option<ChannelEnd> {
        match s {
            "start" => Some(ChannelEnd::Start),
            "end" => Some(ChannelEnd::End),
            _ => None,
        }
    }
}

/// A straight channel of constant width between two nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    pub id: String,
    pub width: f64,
    pub cell_count: usize,
    pub from: usize,
    pub to: usize,
    pub start: Point,
    pub end: Point,
}

impl Channel {
    /// Distance between the two nodes.
    pub fn axis_length(&self) -> f64 {
        self.start.distance(self.end)
    }

    pub fn direction(&self) -> Point {
        (self.end - self.start) * (1.0 / self.axis_length())
    }

    /// Angle of the `+s` direction from the global x-axis.
    pub fn axis_angle(&self) -> f64 {
        let d = self.end - self.start;
        d.y.atan2(d.x)
    }

    pub fn point_at(&self, s: f64) -> Point {
        self.start + self.direction() * s
    }

    /// Axial coordinate of the projection of `p`.
    pub fn s_of(&self, p: Point) -> f64 {
        (p - self.start).dot(self.direction())
    }

    /// Signed lateral offset of `p` from the axis (positive to the left).
    pub fn lateral_of(&self, p: Point) -> f64 {
        self.direction().cross(p - self.start)
    }

    pub fn node_at(&self, end: ChannelEnd) -> usize {
        match end {
            ChannelEnd::Start => self.from,
            ChannelEnd::End => self.to,
        }
    }

    /// Direction pointing from the node at `end` into the channel.
    pub fn inward_direction(&self, end: ChannelEnd) -> Point {
        match end {
            ChannelEnd::Start => self.direction(),
            ChannelEnd::End => self.direction() * -1.0,
        }
    }
}

/// Where a Method B patch comes from. `extension` is how far the patch
/// reaches into each channel beyond its mouth.
#[derive(Clone, Debug, PartialEq)]
pub enum PatchSource {
    Generated { element_size: f64, extension: f64 },
    MeshFile { path: PathBuf, extension: f64 },
}

impl PatchSource {
    pub fn extension(&self) -> f64 {
        match self {
            PatchSource::Generated { extension, .. } | PatchSource::MeshFile { extension, .. } => *extension,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum JunctionStrategy {
    /// One junction-shaped 2D element.
    MethodA,
    /// A local unstructured 2D patch.
    MethodB(PatchSource),
    /// The algebraic star-state solver (three-way junctions only).
    Psfp,
}

impl JunctionStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            JunctionStrategy::MethodA => "method_a",
            JunctionStrategy::MethodB(_) => "method_b",
            JunctionStrategy::Psfp => "psfp",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind {
    Boundary(BoundaryCondition),
    Junction(JunctionStrategy),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub id: String,
    pub position: Point,
    pub kind: NodeKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelNetwork {
    pub nodes: Vec<Node>,
    pub channels: Vec<Channel>,
    /// Protrusion of junction elements into each channel, as a fraction of its width.
    pub protrusion: f64,
}

impl ChannelNetwork {
    pub fn channel_index(&self, id: &str) -> Option<usize> {
        self.channels.iter().position(|c| c.id == id)
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Channel ends attached to a node, in channel order.
    pub fn incident(&self, node: usize) -> Vec<(usize, ChannelEnd)> {
        let mut out = Vec::new();
        for (i, c) in self.channels.iter().enumerate() {
            if c.from == node {
                out.push((i, ChannelEnd::Start));
            }
            if c.to == node {
                out.push((i, ChannelEnd::End));
            }
        }
        out
    }

    /// Arms of a junction as seen from its node.
    pub fn junction_arms(&self, node: usize) -> Vec<JunctionArm> {
        self.incident(node)
            .into_iter()
            .map(|(ch, end)| {
                let c = &self.channels[ch];
                let d = c.inward_direction(end);
                JunctionArm { channel: ch, end, width: c.width, angle: d.y.atan2(d.x) }
            })
            .collect()
    }

    /// Structural checks; returns every problem found.
    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if !(self.protrusion > 0.0 && self.protrusion.is_finite()) {
            errs.push(format!("protrusion must be positive, got {}", self.protrusion));
        }
        for c in &self.channels {
            if !(c.width > 0.0 && c.width.is_finite()) {
                errs.push(format!("channel '{}': width must be positive", c.id));
            }
            if c.cell_count < 2 {
                errs.push(format!("channel '{}': cell_count must be at least 2", c.id));
            }
            if !(c.axis_length() > 0.0) {
                errs.push(format!("channel '{}': zero length", c.id));
            }
            if c.from == c.to {
                errs.push(format!("channel '{}': both ends on the same node", c.id));
            }
        }
        for (i, n) in self.nodes.iter().enumerate() {
            let deg = self.incident(i).len();
            match &n.kind {
                NodeKind::Boundary(_) if deg != 1 => {
                    errs.push(format!("boundary node '{}' must carry exactly one channel end, has {deg}", n.id))
                }
                NodeKind::Junction(JunctionStrategy::Psfp) if deg != 3 => {
                    errs.push(format!("junction '{}': psfp requires exactly 3 channels, has {deg}", n.id))
                }
                NodeKind::Junction(_) if deg < 2 => {
                    errs.push(format!("junction '{}' needs at least 2 channels, has {deg}", n.id))
                }
                _ => {}
            }
        }
        errs
    }
}
