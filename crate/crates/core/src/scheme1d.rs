//! Second-order finite volumes on a 1D channel grid: limited linear
//! reconstruction, half-step Cauchy–Kowalewskaya evolution of the face values
//! and the conservative update.
//!
//! States are stored in the channel frame: `hu` is axial momentum and `hv`
//! transverse momentum, which is non-zero only transiently in cells next to
//! a 2D element.

use crate::error::{Error, Result};
use crate::geometry::ChannelGrid;
use crate::riemann::{hllc_flux, RiemannData};
use crate::swe::{friction_source, time_derivative, ConservedState, Flux, PhysicalParams, H_DRY};

/// Cell averages and axial slopes of one channel.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel1DField {
    pub cells: Vec<ConservedState>,
    pub slopes: Vec<ConservedState>,
}

impl Channel1DField {
    pub fn new(cells: Vec<ConservedState>) -> Self {
        let n = cells.len();
        Channel1DField { cells, slopes: vec![ConservedState::ZERO; n] }
    }

    pub fn volume(&self, grid: &ChannelGrid) -> f64 {
        self.cells.iter().zip(&grid.lengths).map(|(q, l)| q.h * l).sum::<f64>() * grid.width
    }
}

/// Junction-side stencil point of an end cell: axial position and state
/// (in the channel frame).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndNeighbor {
    pub s: f64,
    pub state: ConservedState,
}

/// Barth–Jespersen factor for one scalar with the given face offsets.
pub fn bj_factor(center: f64, slope: f64, offsets: &[f64], lo: f64, hi: f64) -> f64 {
    let mut phi: f64 = 1.0;
    for &d in offsets {
        let delta = slope * d;
        let r = if delta > 0.0 {
            (hi - center) / delta
        } else if delta < 0.0 {
            (lo - center) / delta
        } else {
            continue;
        };
        phi = phi.min(r);
    }
    phi.clamp(0.0, 1.0)
}

/// Limited slopes for every cell. End cells take the stencil point provided
/// for their side; with only one neighbour the slope is zero. Transverse
/// momentum never carries a slope.
pub fn reconstruct_1d(
    grid: &ChannelGrid,
    cells: &[ConservedState],
    start: Option<EndNeighbor>,
    end: Option<EndNeighbor>,
    slopes: &mut [ConservedState],
) {
    let n = cells.len();
    for k in 0..n {
        let left = if k > 0 {
            Some((grid.centers[k - 1], cells[k - 1]))
        } else {
            start.map(|e| (e.s, e.state))
        };
        let right = if k + 1 < n {
            Some((grid.centers[k + 1], cells[k + 1]))
        } else {
            end.map(|e| (e.s, e.state))
        };
        let (Some((sl, ql)), Some((sr, qr))) = (left, right) else {
            slopes[k] = ConservedState::ZERO;
            continue;
        };
        let c = grid.centers[k];
        let q = cells[k];
        let (dl, dr) = (sl - c, sr - c);
        let den = dl * dl + dr * dr;
        let offsets = [grid.faces[k] - c, grid.faces[k + 1] - c];
        let fit = |a: f64, b: f64, m: f64| (dl * (a - m) + dr * (b - m)) / den;
        let bh = fit(ql.h, qr.h, q.h);
        let bu = fit(ql.hu, qr.hu, q.hu);
        let phi_h = bj_factor(q.h, bh, &offsets, q.h.min(ql.h).min(qr.h), q.h.max(ql.h).max(qr.h));
        let phi_u = bj_factor(q.hu, bu, &offsets, q.hu.min(ql.hu).min(qr.hu), q.hu.max(ql.hu).max(qr.hu));
        slopes[k] = ConservedState { h: bh * phi_h, hu: bu * phi_u, hv: 0.0 };
    }
}

/// Value of the linear reconstruction of cell `k` at axial position `s`.
#[inline]
pub fn extrapolate(grid: &ChannelGrid, field: &Channel1DField, k: usize, s: f64) -> ConservedState {
    field.cells[k] + field.slopes[k] * (s - grid.centers[k])
}

/// Evolve a face value by half a step with `∂t Q = -A(Q) ∂s Q`. Falls back
/// to the unevolved value if the depth would not stay positive.
pub fn grp_half_step(q: ConservedState, slope: ConservedState, dt: f64, params: &PhysicalParams) -> Result<ConservedState> {
    if slope == ConservedState::ZERO || dt == 0.0 {
        return Ok(q);
    }
    let dq = time_derivative(q, slope, ConservedState::ZERO, params)?;
    let evolved = q + dq * (0.5 * dt);
    if evolved.h > H_DRY && evolved.is_finite() {
        Ok(evolved)
    } else {
        Ok(q)
    }
}

/// Evolved face value of cell `k` on its start (`right = false`) or end side.
pub fn evolved_face(
    grid: &ChannelGrid,
    field: &Channel1DField,
    k: usize,
    right: bool,
    dt: f64,
    params: &PhysicalParams,
) -> Result<ConservedState> {
    let s = if right { grid.faces[k + 1] } else { grid.faces[k] };
    grp_half_step(extrapolate(grid, field, k, s), field.slopes[k], dt, params)
}

/// Fluxes through the interior faces `1..n`, written to `fluxes[1..n]`.
pub fn interior_fluxes(
    grid: &ChannelGrid,
    field: &Channel1DField,
    dt: f64,
    params: &PhysicalParams,
    fluxes: &mut [Flux],
) -> Result<()> {
    let n = field.cells.len();
    let mut left = evolved_face(grid, field, 0, true, dt, params)?;
    for k in 1..n {
        let right = evolved_face(grid, field, k, false, dt, params)?;
        fluxes[k] = hllc_flux(&RiemannData::new(left, right), params)?;
        if k + 1 < n {
            left = evolved_face(grid, field, k, true, dt, params)?;
        }
    }
    Ok(())
}

/// `Q_k -= dt / Δs_k (F_{k+1/2} - F_{k-1/2}) - dt S(Q_k)` for all cells.
/// `fluxes` has one entry per face, oriented along `+s`, per unit width.
pub fn update_1d(
    grid: &ChannelGrid,
    field: &mut Channel1DField,
    fluxes: &[Flux],
    dt: f64,
    params: &PhysicalParams,
    label: &str,
) -> Result<()> {
    for k in 0..field.cells.len() {
        let q = field.cells[k];
        let mut next = q - (fluxes[k + 1] - fluxes[k]).as_state() * (dt / grid.lengths[k]);
        if params.friction_enabled {
            next += friction_source(q, params)?.as_state() * dt;
        }
        if !(next.h > H_DRY) || !next.is_finite() {
            return Err(Error::Positivity { location: format!("{label} cell {k}"), h: next.h });
        }
        field.cells[k] = next;
    }
    Ok(())
}
