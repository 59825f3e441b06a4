//! Shallow-water physics: states, fluxes, friction, wave speeds and the
//! edge rotation used to reduce 2D fluxes to 1D Riemann problems.
//!
//! All angles are measured from the global x-axis, counter-clockwise positive.
//! The bed is horizontal, so the only source term is Manning friction.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Depth below which primitive variables are undefined.
pub const H_DRY: f64 = 1e-8;

macro_rules! vector3_ops {
    ($ty:ident, $a:ident, $b:ident, $c:ident) => {
        impl Add for $ty {
            type Output = $ty;
            #[inline]
            fn add(self, o: $ty) -> $ty {
                $ty { $a: self.$a + o.$a, $b: self.$b + o.$b, $c: self.$c + o.$c }
            }
        }
        impl Sub for $ty {
            type Output = $ty;
            #[inline]
            fn sub(self, o: $ty) -> $ty {
                $ty { $a: self.$a - o.$a, $b: self.$b - o.$b, $c: self.$c - o.$c }
            }
        }
        impl Mul<f64> for $ty {
            type Output = $ty;
            #[inline]
            fn mul(self, s: f64) -> $ty {
                $ty { $a: self.$a * s, $b: self.$b * s, $c: self.$c * s }
            }
        }
        impl Neg for $ty {
            type Output = $ty;
            #[inline]
            fn neg(self) -> $ty {
                $ty { $a: -self.$a, $b: -self.$b, $c: -self.$c }
            }
        }
        impl AddAssign for $ty {
            #[inline]
            fn add_assign(&mut self, o: $ty) {
                self.$a += o.$a;
                self.$b += o.$b;
                self.$c += o.$c;
            }
        }
        impl SubAssign for $ty {
            #[inline]
            fn sub_assign(&mut self, o: $ty) {
                self.$a -= o.$a;
                self.$b -= o.$b;
                self.$c -= o.$c;
            }
        }
        impl $ty {
            #[inline]
            pub fn to_array(self) -> [f64; 3] {
                [self.$a, self.$b, self.$c]
            }
            #[inline]
            pub fn from_array(v: [f64; 3]) -> Self {
                $ty { $a: v[0], $b: v[1], $c: v[2] }
            }
            pub fn is_finite(&self) -> bool {
                self.$a.is_finite() && self.$b.is_finite() && self.$c.is_finite()
            }
            pub fn max_abs(&self) -> f64 {
                self.$a.abs().max(self.$b.abs()).max(self.$c.abs())
            }
        }
    };
}

/// Conserved variables `(h, hu, hv)` of the 2D system.
///
/// In a 1D channel the same layout is used in the channel frame: `hu` is the
/// axial momentum and `hv` the transverse momentum (zero outside the cells
/// next to a 2D element).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConservedState {
    pub h: f64,
    pub hu: f64,
    pub hv: f64,
}

vector3_ops!(ConservedState, h, hu, hv);

impl ConservedState {
    pub const ZERO: ConservedState = ConservedState { h: 0.0, hu: 0.0, hv: 0.0 };

    pub fn new(h: f64, hu: f64, hv: f64) -> Self {
        ConservedState { h, hu, hv }
    }

    pub fn from_primitive(h: f64, u: f64, v: f64) -> Self {
        ConservedState { h, hu: h * u, hv: h * v }
    }

    /// Still water at depth `h`.
    pub fn at_rest(h: f64) -> Self {
        ConservedState { h, hu: 0.0, hv: 0.0 }
    }

    pub fn is_wet(&self) -> bool {
        self.h > H_DRY
    }

    /// Velocity components `(u, v)`.
    pub fn velocity(&self) -> Result<(f64, f64)> {
        if self.h > H_DRY {
            Ok((self.hu / self.h, self.hv / self.h))
        } else {
            Err(Error::DryState { h: self.h })
        }
    }
}

/// Conserved variables of the 1D system along a channel axis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Conserved1DState {
    pub h: f64,
    pub hu: f64,
}

impl Conserved1DState {
    pub fn new(h: f64, hu: f64) -> Self {
        Conserved1DState { h, hu }
    }

    pub fn from_primitive(h: f64, u: f64) -> Self {
        Conserved1DState { h, hu: h * u }
    }

    pub fn velocity(&self) -> Result<f64> {
        if self.h > H_DRY {
            Ok(self.hu / self.h)
        } else {
            Err(Error::DryState { h: self.h })
        }
    }

    /// Augmented state with zero transverse momentum.
    pub fn augmented(self) -> ConservedState {
        ConservedState { h: self.h, hu: self.hu, hv: 0.0 }
    }
}

impl From<ConservedState> for Conserved1DState {
    fn from(q: ConservedState) -> Self {
        Conserved1DState { h: q.h, hu: q.hu }
    }
}

/// Numerical or physical flux with the layout of [`ConservedState`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Flux {
    pub mass: f64,
    pub mom_x: f64,
    pub mom_y: f64,
}

vector3_ops!(Flux, mass, mom_x, mom_y);

impl Flux {
    pub const ZERO: Flux = Flux { mass: 0.0, mom_x: 0.0, mom_y: 0.0 };

    pub fn new(mass: f64, mom_x: f64, mom_y: f64) -> Self {
        Flux { mass, mom_x, mom_y }
    }

    /// Reinterpret as a state increment (used by the finite-volume updates).
    pub fn as_state(self) -> ConservedState {
        ConservedState { h: self.mass, hu: self.mom_x, hv: self.mom_y }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub g: f64,
    /// Manning coefficient [s/m^(1/3)].
    pub manning_n: f64,
    pub friction_enabled: bool,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams { g: 9.81, manning_n: 0.0, friction_enabled: false }
    }
}

impl PhysicalParams {
    pub fn with_friction(manning_n: f64) -> Self {
        PhysicalParams { manning_n, friction_enabled: true, ..Default::default() }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(format!("g must be positive, got {}", self.g));
        }
        if !(self.manning_n >= 0.0 && self.manning_n.is_finite()) {
            return Err(format!("manning_n must be non-negative, got {}", self.manning_n));
        }
        Ok(())
    }
}

/// Rotation into the frame whose first axis is the outward edge normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeRotation {
    pub theta: f64,
    cos: f64,
    sin: f64,
}

impl EdgeRotation {
    pub fn new(theta: f64) -> Self {
        let (sin, cos) = theta.sin_cos();
        EdgeRotation { theta, cos, sin }
    }

    /// Rotation whose normal is the given (not necessarily unit) vector.
    pub fn from_normal(nx: f64, ny: f64) -> Self {
        let len = nx.hypot(ny);
        EdgeRotation { theta: ny.atan2(nx), cos: nx / len, sin: ny / len }
    }

    pub fn identity() -> Self {
        EdgeRotation { theta: 0.0, cos: 1.0, sin: 0.0 }
    }

    #[inline]
    pub fn cos(&self) -> f64 {
        self.cos
    }

    #[inline]
    pub fn sin(&self) -> f64 {
        self.sin
    }

    /// Unit outward normal `n = (cos θ, sin θ)`.
    pub fn normal(&self) -> (f64, f64) {
        (self.cos, self.sin)
    }

    /// The opposite normal (rotation by θ + π).
    pub fn reversed(&self) -> Self {
        EdgeRotation { theta: self.theta + std::f64::consts::PI, cos: -self.cos, sin: -self.sin }
    }

    /// `T(θ) q`.
    #[inline]
    pub fn rotate(&self, q: ConservedState) -> ConservedState {
        ConservedState {
            h: q.h,
            hu: self.cos * q.hu + self.sin * q.hv,
            hv: -self.sin * q.hu + self.cos * q.hv,
        }
    }

    /// `T⁻¹(θ) q`.
    #[inline]
    pub fn rotate_back(&self, q: ConservedState) -> ConservedState {
        ConservedState {
            h: q.h,
            hu: self.cos * q.hu - self.sin * q.hv,
            hv: self.sin * q.hu + self.cos * q.hv,
        }
    }

    /// `T⁻¹(θ) f`.
    #[inline]
    pub fn rotate_back_flux(&self, f: Flux) -> Flux {
        Flux {
            mass: f.mass,
            mom_x: self.cos * f.mom_x - self.sin * f.mom_y,
            mom_y: self.sin * f.mom_x + self.cos * f.mom_y,
        }
    }

    /// `T(θ) f`.
    #[inline]
    pub fn rotate_flux(&self, f: Flux) -> Flux {
        Flux {
            mass: f.mass,
            mom_x: self.cos * f.mom_x + self.sin * f.mom_y,
            mom_y: -self.sin * f.mom_x + self.cos * f.mom_y,
        }
    }
}

/// x-direction flux `F(Q)`.
pub fn physical_flux(q: ConservedState, params: &PhysicalParams) -> Result<Flux> {
    let (u, _) = q.velocity()?;
    Ok(Flux {
        mass: q.hu,
        mom_x: q.hu * u + 0.5 * params.g * q.h * q.h,
        mom_y: q.hv * u,
    })
}

/// y-direction flux `G(Q)`.
pub fn physical_flux_y(q: ConservedState, params: &PhysicalParams) -> Result<Flux> {
    let (_, v) = q.velocity()?;
    Ok(Flux {
        mass: q.hv,
        mom_x: q.hu * v,
        mom_y: q.hv * v + 0.5 * params.g * q.h * q.h,
    })
}

/// Physical flux through a face with normal `n = (cos θ, sin θ)`: `cos θ F + sin θ G`.
pub fn normal_flux(q: ConservedState, rot: &EdgeRotation, params: &PhysicalParams) -> Result<Flux> {
    Ok(physical_flux(q, params)? * rot.cos() + physical_flux_y(q, params)? * rot.sin())
}

/// Manning friction source `[0, -g h S_fx, -g h S_fy]`.
pub fn friction_source(q: ConservedState, params: &PhysicalParams) -> Result<Flux> {
    let (u, v) = q.velocity()?;
    if !params.friction_enabled || params.manning_n == 0.0 {
        return Ok(Flux::ZERO);
    }
    let speed = u.hypot(v);
    let n2 = params.manning_n * params.manning_n;
    let h43 = q.h.powf(4.0 / 3.0);
    let sfx = n2 * u * speed / h43;
    let sfy = n2 * v * speed / h43;
    Ok(Flux { mass: 0.0, mom_x: -params.g * q.h * sfx, mom_y: -params.g * q.h * sfy })
}

pub fn rotate_state(q: ConservedState, rot: &EdgeRotation) -> ConservedState {
    rot.rotate(q)
}

pub fn rotate_back_flux(f: Flux, rot: &EdgeRotation) -> Flux {
    rot.rotate_back_flux(f)
}

/// `|velocity| + sqrt(g h)`, the bound used by the CFL condition.
pub fn max_wave_speed(q: ConservedState, params: &PhysicalParams) -> Result<f64> {
    let (u, v) = q.velocity()?;
    Ok(u.hypot(v) + (params.g * q.h).sqrt())
}

pub fn froude(q: Conserved1DState, params: &PhysicalParams) -> Result<f64> {
    let u = q.velocity()?;
    Ok(u.abs() / (params.g * q.h).sqrt())
}

/// Cauchy–Kowalewskaya time derivative `-A(Q) ∂x Q - B(Q) ∂y Q` of the
/// homogeneous 2D system, with the conserved-variable Jacobians.
pub fn time_derivative(
    q: ConservedState,
    dq_dx: ConservedState,
    dq_dy: ConservedState,
    params: &PhysicalParams,
) -> Result<ConservedState> {
    let (u, v) = q.velocity()?;
    let c2 = params.g * q.h;
    // A = [[0,1,0],[c²-u², 2u, 0],[-uv, v, u]]
    let ax = ConservedState {
        h: dq_dx.hu,
        hu: (c2 - u * u) * dq_dx.h + 2.0 * u * dq_dx.hu,
        hv: -u * v * dq_dx.h + v * dq_dx.hu + u * dq_dx.hv,
    };
    // B = [[0,0,1],[-uv, v, u],[c²-v², 0, 2v]]
    let by = ConservedState {
        h: dq_dy.hv,
        hu: -u * v * dq_dy.h + v * dq_dy.hu + u * dq_dy.hv,
        hv: (c2 - v * v) * dq_dy.h + 2.0 * v * dq_dy.hv,
    };
    Ok(-(ax + by))
}
