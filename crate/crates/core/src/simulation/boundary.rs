use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::riemann::{hllc_flux, wall_flux, RiemannData};
use crate::swe::{ConservedState, Flux, PhysicalParams, H_DRY};

/// Prescribed inflow velocity `u(t)`, positive into the domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InflowFunction {
    /// `amplitude * exp(-0.5 ((t - t0) / sigma)^2)`.
    Gaussian { amplitude: f64, t0: f64, sigma: f64 },
    Constant { u: f64 },
}

impl InflowFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            InflowFunction::Gaussian { amplitude, t0, sigma } => {
                let z = (t - t0) / sigma;
                amplitude * (-0.5 * z * z).exp()
            }
            InflowFunction::Constant { u } => u,
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        match *self {
            InflowFunction::Gaussian { amplitude, t0, sigma } => {
                if !(amplitude.is_finite() && t0.is_finite() && sigma > 0.0 && sigma.is_finite()) {
                    return Err("gaussian inflow needs finite amplitude/t0 and positive sigma".into());
                }
            }
            InflowFunction::Constant { u } => {
                if !u.is_finite() {
                    return Err("constant inflow must be finite".into());
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryCondition {
    Reflective,
    Transparent,
    /// Velocity imposed from `u(t)`, depth from the outgoing Riemann invariant.
    Inflow(InflowFunction),
    /// Fixed ghost state; `u` is the velocity into the domain.
    Prescribed { h: f64, u: f64 },
}

impl BoundaryCondition {
    pub fn validate(&self) -> std::result::Result<(), String> {
        match self {
            BoundaryCondition::Inflow(f) => f.validate(),
            BoundaryCondition::Prescribed { h, u } => {
                if !(*h > H_DRY && h.is_finite() && u.is_finite()) {
                    Err(format!("prescribed state needs h > 0 and finite u, got h={h}, u={u}"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// Ghost state for an inflow edge: the interior's outgoing invariant
/// `u_n + 2c` is kept while the normal velocity is set to `-u_in`.
pub fn inflow_ghost(inner: ConservedState, u_in: f64, params: &PhysicalParams) -> Result<ConservedState> {
    let (un, _) = inner.velocity()?;
    let ub = -u_in;
    let cb = (params.g * inner.h).sqrt() + 0.5 * (un - ub);
    if !(cb > 0.0) {
        return Err(Error::DryState { h: 0.0 });
    }
    let hb = cb * cb / params.g;
    Ok(ConservedState::from_primitive(hb, ub, 0.0))
}

/// Boundary flux for an edge, with `inner` already in the outward-normal
/// frame. The result is in the same frame.
pub fn apply_boundary(inner: ConservedState, bc: &BoundaryCondition, t: f64, params: &PhysicalParams) -> Result<Flux> {
    match bc {
        BoundaryCondition::Reflective => wall_flux(inner, params),
        BoundaryCondition::Transparent => hllc_flux(&RiemannData::new(inner, inner), params),
        BoundaryCondition::Inflow(f) => {
            let ghost = inflow_ghost(inner, f.eval(t), params)?;
            hllc_flux(&RiemannData::new(inner, ghost), params)
        }
        BoundaryCondition::Prescribed { h, u } => {
            let ghost = ConservedState::from_primitive(*h, -*u, 0.0);
            hllc_flux(&RiemannData::new(inner, ghost), params)
        }
    }
}
