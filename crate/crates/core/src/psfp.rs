//! Algebraic junction solver for three-way junctions.
//!
//! The six unknowns are the star depths and velocities next to the junction
//! in each channel. Three equations carry the Riemann invariant arriving from
//! each channel, one closes mass and two equate total head. Velocities are
//! measured along each channel's `+s` axis; `sigma = +1` for a channel whose
//! end sits at the junction and `-1` for one that starts there.

use std::fmt;

use nalgebra::{Matrix6, Vector6};

use crate::error::{Error, Result};
use crate::geometry::ChannelEnd;
use crate::swe::{Flux, PhysicalParams};

pub const PSFP_TOLERANCE: f64 = 1e-10;
pub const PSFP_MAX_ITER: usize = 50;
pub const PSFP_MAX_HALVINGS: usize = 10;
/// Extra Newton steps after convergence so that mass closes to round-off.
const POLISH_STEPS: usize = 3;

/// Junction type, used to derive the channel orientations of the classical
/// three-channel layout (channel 1 first).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JunctionOrientation {
    /// Channel 1 ends at the junction, channels 2 and 3 start there.
    Diverging,
    /// Channels 2 and 3 end at the junction, channel 1 starts there.
    Merging,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsfpArm {
    pub width: f64,
    pub h: f64,
    pub u: f64,
    /// `+1` if the channel's end is at the junction, `-1` if its start is.
    pub sigma: f64,
}

impl PsfpArm {
    pub fn sigma_for(end: ChannelEnd) -> f64 {
        match end {
            ChannelEnd::End => 1.0,
            ChannelEnd::Start => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsfpProblem {
    pub arms: [PsfpArm; 3],
}

impl PsfpProblem {
    pub fn new(b: [f64; 3], h: [f64; 3], u: [f64; 3], orientation: JunctionOrientation) -> Self {
        let s = match orientation {
            JunctionOrientation::Diverging => [1.0, -1.0, -1.0],
            JunctionOrientation::Merging => [-1.0, 1.0, 1.0],
        };
        let arm = |i: usize| PsfpArm { width: b[i], h: h[i], u: u[i], sigma: s[i] };
        PsfpProblem { arms: [arm(0), arm(1), arm(2)] }
    }

    /// The interior states as a candidate solution.
    pub fn interior(&self) -> PsfpStarState {
        PsfpStarState { h: self.arms.map(|a| a.h), u: self.arms.map(|a| a.u) }
    }
}

/// Star depths and velocities `(h_i*, u_i*)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsfpStarState {
    pub h: [f64; 3],
    pub u: [f64; 3],
}

impl PsfpStarState {
    fn to_vector(self) -> Vector6<f64> {
        Vector6::new(self.h[0], self.u[0], self.h[1], self.u[1], self.h[2], self.u[2])
    }

    fn from_vector(v: &Vector6<f64>) -> Self {
        PsfpStarState { h: [v[0], v[2], v[4]], u: [v[1], v[3], v[5]] }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PsfpFailure {
    /// Iteration cap reached while still making progress.
    NonConvergence { iterations: usize, residual: f64 },
    /// No real descent direction or a non-positive depth: the data sit in
    /// the regime where the system has no real root.
    ComplexRootRegime { iterations: usize, residual: f64, reason: String },
    /// An interior state is supercritical, outside the method's assumptions.
    SupercriticalData { arm: usize, froude: f64 },
    /// The converged star state is supercritical.
    SupercriticalStar { arm: usize, froude: f64 },
}

impl fmt::Display for PsfpFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsfpFailure::NonConvergence { iterations, residual } => {
                write!(f, "Newton did not converge in {iterations} iterations (residual {residual:e})")
            }
            PsfpFailure::ComplexRootRegime { iterations, residual, reason } => {
                write!(f, "no real solution after {iterations} iterations ({reason}, residual {residual:e})")
            }
            PsfpFailure::SupercriticalData { arm, froude } => {
                write!(f, "interior state of arm {} is supercritical (Fr = {froude:.4})", arm + 1)
            }
            PsfpFailure::SupercriticalStar { arm, froude } => {
                write!(f, "star state of arm {} is supercritical (Fr = {froude:.4})", arm + 1)
            }
        }
    }
}

/// A converged solve with its diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct PsfpSolution {
    pub state: PsfpStarState,
    /// Newton iterations needed to reach the tolerance (polishing excluded).
    pub iterations: usize,
    pub residual: f64,
    /// Residual norm after each iteration, starting with the initial guess.
    pub trace: Vec<f64>,
}

/// Failed solve with diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct PsfpError {
    pub failure: PsfpFailure,
    pub trace: Vec<f64>,
    pub last_iterate: PsfpStarState,
}

/// The six residuals: three invariants, mass, two head equalities.
pub fn psfp_residual(s: &PsfpStarState, p: &PsfpProblem, params: &PhysicalParams) -> Result<[f64; 6]> {
    let g = params.g;
    if let Some(i) = (0..3).find(|&i| !(s.h[i] > 0.0)) {
        return Err(Error::DryState { h: s.h[i] });
    }
    let mut r = [0.0; 6];
    for i in 0..3 {
        let a = &p.arms[i];
        r[i] = s.u[i] + a.sigma * 2.0 * (g * s.h[i]).sqrt() - (a.u + a.sigma * 2.0 * (g * a.h).sqrt());
    }
    r[3] = (0..3).map(|i| p.arms[i].sigma * p.arms[i].width * s.h[i] * s.u[i]).sum();
    let head = |i: usize| s.h[i] + s.u[i] * s.u[i] / (2.0 * g);
    r[4] = head(0) - head(1);
    r[5] = head(0) - head(2);
    Ok(r)
}

/// Analytic Jacobian, rows as in [`psfp_residual`], columns `(h1,u1,h2,u2,h3,u3)`.
pub fn psfp_jacobian(s: &PsfpStarState, p: &PsfpProblem, params: &PhysicalParams) -> [[f64; 6]; 6] {
    let g = params.g;
    let mut j = [[0.0; 6]; 6];
    for i in 0..3 {
        let a = &p.arms[i];
        j[i][2 * i] = a.sigma * (g / s.h[i]).sqrt();
        j[i][2 * i + 1] = 1.0;
        j[3][2 * i] = a.sigma * a.width * s.u[i];
        j[3][2 * i + 1] = a.sigma * a.width * s.h[i];
    }
    j[4][0] = 1.0;
    j[4][1] = s.u[0] / g;
    j[4][2] = -1.0;
    j[4][3] = -s.u[1] / g;
    j[5][0] = 1.0;
    j[5][1] = s.u[0] / g;
    j[5][4] = -1.0;
    j[5][5] = -s.u[2] / g;
    j
}

fn inf_norm(r: &[f64; 6]) -> f64 {
    r.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn froude(h: f64, u: f64, g: f64) -> f64 {
    u.abs() / (g * h).sqrt()
}

/// Damped Newton from `guess`.
pub fn psfp_solve_from(
    p: &PsfpProblem,
    guess: PsfpStarState,
    params: &PhysicalParams,
) -> std::result::Result<PsfpSolution, PsfpError> {
    let g = params.g;
    let mut x = guess.to_vector();
    let fail = |failure: PsfpFailure, trace: Vec<f64>, x: &Vector6<f64>| PsfpError {
        failure,
        trace,
        last_iterate: PsfpStarState::from_vector(x),
    };
    let eval = |x: &Vector6<f64>| psfp_residual(&PsfpStarState::from_vector(x), p, params).ok();
    let Some(mut r) = eval(&x) else {
        return Err(fail(
            PsfpFailure::ComplexRootRegime { iterations: 0, residual: f64::NAN, reason: "non-positive initial depth".into() },
            vec![],
            &x,
        ));
    };
    let mut norm = inf_norm(&r);
    let mut trace = vec![norm];
    let mut iterations = 0;
    while norm >= PSFP_TOLERANCE {
        if iterations == PSFP_MAX_ITER {
            return Err(fail(PsfpFailure::NonConvergence { iterations, residual: norm }, trace, &x));
        }
        iterations += 1;
        let jac = Matrix6::from_fn(|i, k| psfp_jacobian(&PsfpStarState::from_vector(&x), p, params)[i][k]);
        let rhs = -Vector6::from_row_slice(&r);
        let Some(step) = jac.lu().solve(&rhs) else {
            return Err(fail(
                PsfpFailure::ComplexRootRegime { iterations, residual: norm, reason: "singular Jacobian".into() },
                trace,
                &x,
            ));
        };
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=PSFP_MAX_HALVINGS {
            let cand = x + step * lambda;
            if let Some(rc) = eval(&cand) {
                let nc = inf_norm(&rc);
                if nc < norm && nc.is_finite() {
                    accepted = Some((cand, rc, nc));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((cand, rc, nc)) = accepted else {
            return Err(fail(
                PsfpFailure::ComplexRootRegime {
                    iterations,
                    residual: norm,
                    reason: "no real descent step along the Newton direction".into(),
                },
                trace,
                &x,
            ));
        };
        x = cand;
        r = rc;
        norm = nc;
        trace.push(norm);
    }
    for _ in 0..POLISH_STEPS {
        if norm == 0.0 {
            break;
        }
        let jac = Matrix6::from_fn(|i, k| psfp_jacobian(&PsfpStarState::from_vector(&x), p, params)[i][k]);
        let Some(step) = jac.lu().solve(&-Vector6::from_row_slice(&r)) else { break };
        let cand = x + step;
        match eval(&cand) {
            Some(rc) if inf_norm(&rc) < norm => {
                x = cand;
                r = rc;
                norm = inf_norm(&r);
            }
            _ => break,
        }
    }
    let state = PsfpStarState::from_vector(&x);
    for i in 0..3 {
        let fr = froude(state.h[i], state.u[i], g);
        if fr >= 1.0 {
            return Err(fail(PsfpFailure::SupercriticalStar { arm: i, froude: fr }, trace, &x));
        }
    }
    Ok(PsfpSolution { state, iterations, residual: norm, trace })
}

/// Check the interior data, then run damped Newton from the interior states.
pub fn psfp_solve(p: &PsfpProblem, params: &PhysicalParams) -> std::result::Result<PsfpSolution, PsfpError> {
    for (i, a) in p.arms.iter().enumerate() {
        let fr = froude(a.h, a.u, params.g);
        if !(fr < 1.0) {
            return Err(PsfpError {
                failure: PsfpFailure::SupercriticalData { arm: i, froude: fr },
                trace: vec![],
                last_iterate: p.interior(),
            });
        }
    }
    psfp_solve_from(p, p.interior(), params)
}

/// Physical 1D flux at each star state, along each channel's `+s` axis.
pub fn psfp_boundary_fluxes(s: &PsfpStarState, params: &PhysicalParams) -> [Flux; 3] {
    let f = |i: usize| {
        let (h, u) = (s.h[i], s.u[i]);
        Flux::new(h * u, h * u * u + 0.5 * params.g * h * h, 0.0)
    };
    [f(0), f(1), f(2)]
}
