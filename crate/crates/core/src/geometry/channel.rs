use super::network::{Channel, ChannelEnd};
use crate::error::{Error, Result};

/// How a channel end is cut back where it meets a junction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EndTrim {
    /// The 1D domain reaches the node.
    None,
    /// `mouth`: distance from the node to where the channel walls leave the
    /// junction core; `overlap`: extra depth covered by the 2D element(s).
    Junction { mouth: f64, overlap: f64 },
}

impl EndTrim {
    fn mouth(self) -> f64 {
        match self {
            EndTrim::None => 0.0,
            EndTrim::Junction { mouth, .. } => mouth,
        }
    }

    fn cut(self) -> f64 {
        match self {
            EndTrim::None => 0.0,
            EndTrim::Junction { mouth, overlap } => mouth + overlap,
        }
    }
}

/// Uniform 1D grid along a channel axis, with `s` measured from the start node.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelGrid {
    pub faces: Vec<f64>,
    pub centers: Vec<f64>,
    pub lengths: Vec<f64>,
    /// Mouth-to-mouth length divided by the requested cell count.
    pub nominal_dx: f64,
    pub width: f64,
    /// Axial position of the 2D neighbour used to reconstruct the end cell.
    pub start_neighbor_s: Option<f64>,
    pub end_neighbor_s: Option<f64>,
}

impl ChannelGrid {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.lengths.iter().sum::<f64>() * self.width
    }

    /// Index of the end cell.
    pub fn end_cell(&self, end: ChannelEnd) -> usize {
        match end {
            ChannelEnd::Start => 0,
            ChannelEnd::End => self.len() - 1,
        }
    }

    pub fn face_at(&self, end: ChannelEnd) -> f64 {
        match end {
            ChannelEnd::Start => self.faces[0],
            ChannelEnd::End => self.faces[self.faces.len() - 1],
        }
    }

    /// Record the axial position of the 2D centroid next to `end`.
    pub fn set_junction_neighbor(&mut self, end: ChannelEnd, s: f64) {
        match end {
            ChannelEnd::Start => self.start_neighbor_s = Some(s),
            ChannelEnd::End => self.end_neighbor_s = Some(s),
        }
    }

    /// Distance between the end cell centre and its junction-side stencil point.
    pub fn stencil_spacing(&self, end: ChannelEnd) -> Option<f64> {
        let k = self.end_cell(end);
        match end {
            ChannelEnd::Start => self.start_neighbor_s.map(|s| (self.centers[k] - s).abs()),
            ChannelEnd::End => self.end_neighbor_s.map(|s| (s - self.centers[k]).abs()),
        }
    }

    /// Cell containing axial position `s`, if inside the grid.
    pub fn locate(&self, s: f64) -> Option<usize> {
        if s < self.faces[0] || s > self.faces[self.faces.len() - 1] {
            return None;
        }
        let k = self.faces.partition_point(|&f| f <= s);
        Some(k.saturating_sub(1).min(self.len() - 1))
    }
}

/// Discretize a channel into `cell_count` uniform cells between its mouths,
/// then cut back junction ends by the overlap. A cut cell shorter than half
/// the nominal size is merged with its neighbour.
pub fn discretize_channel(ch: &Channel, start: EndTrim, end: EndTrim) -> Result<ChannelGrid> {
    let d = ch.axis_length();
    let s_a = start.mouth();
    let s_b = d - end.mouth();
    let l = s_b - s_a;
    if !(l > 0.0) || ch.cell_count < 2 {
        return Err(Error::DegenerateGeometry(format!("channel '{}' has no room for cells (length {l})", ch.id)));
    }
    let n = ch.cell_count;
    let dx = l / n as f64;
    let nominal: Vec<f64> = (0..=n).map(|k| if k == n { s_b } else { s_a + dx * k as f64 }).collect();
    let lo = start.cut();
    let hi = d - end.cut();
    let tol = 1e-9 * dx;
    let mut faces = vec![lo];
    faces.extend(nominal.iter().copied().filter(|&f| f > lo + tol && f < hi - tol));
    faces.push(hi);
    if faces.len() > 2 && faces[1] - faces[0] < 0.5 * dx {
        faces.remove(1);
    }
    let m = faces.len();
    if m > 2 && faces[m - 1] - faces[m - 2] < 0.5 * dx {
        faces.remove(m - 2);
    }
    if faces.len() < 3 {
        return Err(Error::DegenerateGeometry(format!(
            "channel '{}' keeps fewer than 2 cells after junction overlap is removed",
            ch.id
        )));
    }
    let centers = faces.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let lengths = faces.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(ChannelGrid {
        faces,
        centers,
        lengths,
        nominal_dx: dx,
        width: ch.width,
        start_neighbor_s: None,
        end_neighbor_s: None,
    })
}
