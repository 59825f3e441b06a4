//! Interface Riemann solvers in the edge-normal frame.
//!
//! `hllc_flux` is the production flux. `exact_riemann` is the classical
//! wet-bed exact solver and exists to validate the approximate one.

use crate::error::{Error, Result};
use crate::swe::{physical_flux, ConservedState, Flux, PhysicalParams, H_DRY};

/// Left and right states of a local Riemann problem, already rotated into
/// the frame whose first axis is the edge normal (pointing from left to right).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiemannData {
    pub left: ConservedState,
    pub right: ConservedState,
}

impl RiemannData {
    pub fn new(left: ConservedState, right: ConservedState) -> Self {
        RiemannData { left, right }
    }
}

/// Estimated wave speeds `(S_L, S*, S_R)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveSpeeds {
    pub left: f64,
    pub star: f64,
    pub right: f64,
}

fn shock_factor(h_star: f64, h: f64) -> f64 {
    if h_star > h {
        (0.5 * (h_star + h) * h_star / (h * h)).sqrt()
    } else {
        1.0
    }
}

/// Two-rarefaction depth estimate with shock-corrected outer speeds.
pub fn wave_speeds(d: &RiemannData, params: &PhysicalParams) -> Result<WaveSpeeds> {
    let (hl, hr) = (d.left.h, d.right.h);
    let (ul, _) = d.left.velocity()?;
    let (ur, _) = d.right.velocity()?;
    let g = params.g;
    let al = (g * hl).sqrt();
    let ar = (g * hr).sqrt();
    let bracket = (0.5 * (al + ar) + 0.25 * (ul - ur)).max(0.0);
    let h_star = bracket * bracket / g;
    let sl = ul - al * shock_factor(h_star, hl);
    let sr = ur + ar * shock_factor(h_star, hr);
    let denom = hr * (ur - sr) - hl * (ul - sl);
    let star = if denom.abs() > 0.0 {
        (sl * hr * (ur - sr) - sr * hl * (ul - sl)) / denom
    } else {
        0.5 * (ul + ur)
    };
    Ok(WaveSpeeds { left: sl, star, right: sr })
}

/// HLLC flux of the augmented system; the transverse momentum is passively
/// advected with the contact.
pub fn hllc_flux(d: &RiemannData, params: &PhysicalParams) -> Result<Flux> {
    let fl = physical_flux(d.left, params)?;
    let fr = physical_flux(d.right, params)?;
    let s = wave_speeds(d, params)?;
    if s.left >= 0.0 {
        return Ok(fl);
    }
    if s.right <= 0.0 {
        return Ok(fr);
    }
    let inv = 1.0 / (s.right - s.left);
    let mass = (s.right * fl.mass - s.left * fr.mass + s.left * s.right * (d.right.h - d.left.h)) * inv;
    let mom_x = (s.right * fl.mom_x - s.left * fr.mom_x + s.left * s.right * (d.right.hu - d.left.hu)) * inv;
    let v_upwind = if s.star >= 0.0 { d.left.hv / d.left.h } else { d.right.hv / d.right.h };
    Ok(Flux { mass, mom_x, mom_y: mass * v_upwind })
}

/// Flux through a reflective edge: the HLLC flux against the mirror state
/// `(h, -hu, hv)`. Mass and tangential components vanish identically.
pub fn wall_flux(inner: ConservedState, params: &PhysicalParams) -> Result<Flux> {
    let mirror = ConservedState { h: inner.h, hu: -inner.hu, hv: inner.hv };
    let s = wave_speeds(&RiemannData::new(inner, mirror), params)?;
    let (u, _) = inner.velocity()?;
    // S_R = -S_L for the mirrored problem, so the HLL average reduces to this.
    let speed = s.right.abs().max(s.left.abs());
    let mom_x = inner.hu * u + 0.5 * params.g * inner.h * inner.h + speed * inner.hu;
    Ok(Flux { mass: 0.0, mom_x, mom_y: 0.0 })
}

/// Star-region solution of the exact Riemann problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StarSolution {
    pub h: f64,
    pub u: f64,
    pub iterations: usize,
}

pub const EXACT_TOLERANCE: f64 = 1e-12;
pub const EXACT_MAX_ITER: usize = 100;

/// Depth function `f_K(h)` and its derivative for one side.
fn side_function(h: f64, hk: f64, g: f64) -> (f64, f64) {
    let ak = (g * hk).sqrt();
    if h <= hk {
        let a = (g * h).sqrt();
        (2.0 * (a - ak), g / a)
    } else {
        let gk = (0.5 * g * (h + hk) / (h * hk)).sqrt();
        let f = (h - hk) * gk;
        let df = gk - g * (h - hk) / (4.0 * gk * h * h);
        (f, df)
    }
}

fn primitive_pair(d: &RiemannData) -> Result<(f64, f64, f64, f64)> {
    let (ul, _) = d.left.velocity()?;
    let (ur, _) = d.right.velocity()?;
    Ok((d.left.h, ul, d.right.h, ur))
}

fn check_positivity(hl: f64, ul: f64, hr: f64, ur: f64, g: f64) -> Result<()> {
    let crit = 2.0 * ((g * hl).sqrt() + (g * hr).sqrt()) - (ur - ul);
    if crit <= 0.0 {
        return Err(Error::Riemann(format!("depth positivity condition violated (margin {crit:e})")));
    }
    Ok(())
}

fn star_velocity(h: f64, hl: f64, ul: f64, hr: f64, ur: f64, g: f64) -> f64 {
    let fl = side_function(h, hl, g).0;
    let fr = side_function(h, hr, g).0;
    0.5 * (ul + ur) + 0.5 * (fr - fl)
}

/// Newton iteration on `f_L(h) + f_R(h) + u_R - u_L = 0`.
pub fn star_state_newton(d: &RiemannData, params: &PhysicalParams) -> Result<StarSolution> {
    let (hl, ul, hr, ur) = primitive_pair(d)?;
    let g = params.g;
    check_positivity(hl, ul, hr, ur, g)?;
    let al = (g * hl).sqrt();
    let ar = (g * hr).sqrt();
    let bracket = 0.5 * (al + ar) + 0.25 * (ul - ur);
    let mut h = (bracket * bracket / g).max(1e-3 * hl.min(hr));
    for it in 1..=EXACT_MAX_ITER {
        let (fl, dfl) = side_function(h, hl, g);
        let (fr, dfr) = side_function(h, hr, g);
        let f = fl + fr + ur - ul;
        let mut next = h - f / (dfl + dfr);
        if next <= 0.0 {
            next = 0.5 * h;
        }
        let change = (next - h).abs();
        h = next;
        if change <= EXACT_TOLERANCE * h.max(1.0) {
            return Ok(StarSolution { h, u: star_velocity(h, hl, ul, hr, ur, g), iterations: it });
        }
    }
    Err(Error::Riemann(format!("Newton did not converge in {EXACT_MAX_ITER} iterations")))
}

/// Bisection on the same depth function, used to cross-check Newton.
pub fn star_state_bisection(d: &RiemannData, params: &PhysicalParams) -> Result<StarSolution> {
    let (hl, ul, hr, ur) = primitive_pair(d)?;
    let g = params.g;
    check_positivity(hl, ul, hr, ur, g)?;
    let f = |h: f64| side_function(h, hl, g).0 + side_function(h, hr, g).0 + ur - ul;
    let mut lo = 0.0_f64;
    let mut hi = hl.max(hr).max(H_DRY);
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut iterations = 0;
    while hi - lo > 1e-15 * hi && iterations < 400 {
        let mid = 0.5 * (lo + hi);
        let fm = if mid > 0.0 { f(mid) } else { f(H_DRY) };
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let h = 0.5 * (lo + hi);
    Ok(StarSolution { h, u: star_velocity(h, hl, ul, hr, ur, g), iterations })
}

/// Exact solution of the wet-bed Riemann problem sampled at `xi = x / t`.
pub fn exact_riemann(d: &RiemannData, params: &PhysicalParams, xi: f64) -> Result<ConservedState> {
    let star = star_state_newton(d, params)?;
    Ok(sample_exact(d, &star, params, xi))
}

/// Sample a previously computed star solution at `xi`.
pub fn sample_exact(d: &RiemannData, star: &StarSolution, params: &PhysicalParams, xi: f64) -> ConservedState {
    let g = params.g;
    let (hl, hr) = (d.left.h, d.right.h);
    let ul = d.left.hu / hl;
    let ur = d.right.hu / hr;
    let vl = d.left.hv / hl;
    let vr = d.right.hv / hr;
    let al = (g * hl).sqrt();
    let ar = (g * hr).sqrt();
    let a_star = (g * star.h).sqrt();
    let (h, u, v) = if xi <= star.u {
        if star.h > hl {
            let sl = ul - al * shock_factor(star.h, hl);
            if xi <= sl { (hl, ul, vl) } else { (star.h, star.u, vl) }
        } else {
            let head = ul - al;
            let tail = star.u - a_star;
            if xi <= head {
                (hl, ul, vl)
            } else if xi >= tail {
                (star.h, star.u, vl)
            } else {
                let a = (ul + 2.0 * al - xi) / 3.0;
                (a * a / g, (ul + 2.0 * al + 2.0 * xi) / 3.0, vl)
            }
        }
    } else if star.h > hr {
        let sr = ur + ar * shock_factor(star.h, hr);
        if xi >= sr { (hr, ur, vr) } else { (star.h, star.u, vr) }
    } else {
        let head = ur + ar;
        let tail = star.u + a_star;
        if xi >= head {
            (hr, ur, vr)
        } else if xi <= tail {
            (star.h, star.u, vr)
        } else {
            let a = (-ur + 2.0 * ar + xi) / 3.0;
            (a * a / g, (ur - 2.0 * ar + 2.0 * xi) / 3.0, vr)
        }
    };
    ConservedState::from_primitive(h, u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn p() -> PhysicalParams {
        PhysicalParams::default()
    }

    #[test]
    fn still_water_flux() {
        let q = ConservedState::at_rest(1.0);
        let f = hllc_flux(&RiemannData::new(q, q), &p()).unwrap();
        assert_eq!(f.mass, 0.0);
        assert_abs_diff_eq!(f.mom_x, 4.905, epsilon = 1e-14);
        assert_eq!(f.mom_y, 0.0);
    }

    #[test]
    fn dam_break_mass_flux_positive() {
        let d = RiemannData::new(ConservedState::at_rest(1.0), ConservedState::at_rest(0.5));
        assert!(hllc_flux(&d, &p()).unwrap().mass > 0.0);
    }

    #[test]
    fn wall_flux_examples() {
        let f = wall_flux(ConservedState::at_rest(1.0), &p()).unwrap();
        assert_eq!(f.mass, 0.0);
        assert_abs_diff_eq!(f.mom_x, 4.905, epsilon = 1e-14);
        assert_eq!(f.mom_y, 0.0);
        let q = ConservedState::from_primitive(0.8, 0.5, 0.3);
        let f = wall_flux(q, &p()).unwrap();
        assert!(f.mom_x > 0.5 * 9.81 * 0.64);
        assert_eq!(f.mass, 0.0);
        assert_eq!(f.mom_y, 0.0);
        // agrees with the general solver on the mirrored problem
        let mirror = ConservedState::new(q.h, -q.hu, q.hv);
        let general = hllc_flux(&RiemannData::new(q, mirror), &p()).unwrap();
        assert_abs_diff_eq!(general.mom_x, f.mom_x, epsilon = 1e-13);
        assert!(general.mass.abs() < 1e-15);
    }

    #[test]
    fn exact_examples() {
        let q = ConservedState::from_primitive(0.7, 0.2, 0.1);
        for xi in [-5.0, -0.1, 0.0, 0.3, 4.0] {
            let s = exact_riemann(&RiemannData::new(q, q), &p(), xi).unwrap();
            assert!((s - q).max_abs() < 1e-12);
        }
        let d = RiemannData::new(ConservedState::from_primitive(1.0, -1.0, 0.0), ConservedState::from_primitive(1.0, 1.0, 0.0));
        let star = star_state_newton(&d, &p()).unwrap();
        assert!(star.h < 1.0);
        assert!(star.u.abs() < 1e-14);

        let d = RiemannData::new(ConservedState::at_rest(1.0), ConservedState::at_rest(0.5));
        let n = star_state_newton(&d, &p()).unwrap();
        let b = star_state_bisection(&d, &p()).unwrap();
        assert!((n.h - b.h).abs() < 1e-10, "{} vs {}", n.h, b.h);
        assert!((n.u - b.u).abs() < 1e-10);
    }

    #[test]
    fn positivity_violation_reported() {
        let d = RiemannData::new(ConservedState::from_primitive(0.1, -5.0, 0.0), ConservedState::from_primitive(0.1, 5.0, 0.0));
        assert!(matches!(star_state_newton(&d, &p()), Err(Error::Riemann(_))));
    }

    #[test]
    fn contact_carries_transverse_velocity() {
        let d = RiemannData::new(ConservedState::from_primitive(1.0, 0.0, 0.7), ConservedState::from_primitive(0.5, 0.0, -0.2));
        let star = star_state_newton(&d, &p()).unwrap();
        let just_left = sample_exact(&d, &star, &p(), star.u - 1e-9);
        let just_right = sample_exact(&d, &star, &p(), star.u + 1e-9);
        assert_abs_diff_eq!(just_left.hv / just_left.h, 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(just_right.hv / just_right.h, -0.2, epsilon = 1e-12);
    }

    /// The star depth satisfies the Rankine–Hugoniot jump conditions across
    /// the left shock of a collision problem.
    #[test]
    fn shock_satisfies_jump_conditions() {
        let d = RiemannData::new(ConservedState::from_primitive(0.5, 1.0, 0.0), ConservedState::from_primitive(0.5, -1.0, 0.0));
        let g = p().g;
        let star = star_state_newton(&d, &p()).unwrap();
        let s = 1.0 - (g * 0.5f64).sqrt() * shock_factor(star.h, 0.5);
        let mass_jump = star.h * star.u - 0.5 * 1.0;
        assert_abs_diff_eq!(mass_jump, s * (star.h - 0.5), epsilon = 1e-10);
        let mom_jump = star.h * star.u * star.u + 0.5 * g * star.h * star.h - (0.5 + 0.5 * g * 0.25);
        assert_abs_diff_eq!(mom_jump, s * (star.h * star.u - 0.5), epsilon = 1e-10);
    }

    /// First-order Godunov with HLLC on the dam break converges to the exact
    /// solution with monotonically shrinking L1 error.
    #[test]
    fn godunov_dam_break_converges() {
        let params = p();
        let d = RiemannData::new(ConservedState::at_rest(1.0), ConservedState::at_rest(0.5));
        let star = star_state_newton(&d, &params).unwrap();
        let t_end = 0.1;
        let mut errors = Vec::new();
        for n in [50usize, 100, 200, 400] {
            let dx = 1.0 / n as f64;
            let mut q: Vec<ConservedState> = (0..n)
                .map(|i| if (i as f64 + 0.5) * dx < 0.5 { d.left } else { d.right })
                .collect();
            let mut t = 0.0;
            while t < t_end {
                let lam = q.iter().map(|c| crate::swe::max_wave_speed(*c, &params).unwrap()).fold(0.0, f64::max);
                let dt = (0.9 * dx / lam).min(t_end - t);
                let mut flux = vec![Flux::ZERO; n + 1];
                for i in 0..=n {
                    let l = q[i.saturating_sub(1)];
                    let r = q[i.min(n - 1)];
                    flux[i] = hllc_flux(&RiemannData::new(l, r), &params).unwrap();
                }
                for i in 0..n {
                    q[i] -= (flux[i + 1] - flux[i]).as_state() * (dt / dx);
                }
                t += dt;
            }
            let err: f64 = (0..n)
                .map(|i| {
                    let x = (i as f64 + 0.5) * dx - 0.5;
                    (q[i].h - sample_exact(&d, &star, &params, x / t_end).h).abs() * dx
                })
                .sum();
            errors.push(err);
        }
        for w in errors.windows(2) {
            assert!(w[1] < w[0], "{errors:?}");
        }
    }

    fn state() -> impl Strategy<Value = ConservedState> {
        (0.05f64..3.0, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(h, u, v)| ConservedState::from_primitive(h, u, v))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn consistency(q in state()) {
            let params = p();
            let f = hllc_flux(&RiemannData::new(q, q), &params).unwrap();
            let e = physical_flux(q, &params).unwrap();
            prop_assert!((f - e).max_abs() <= 1e-13 * (1.0 + e.max_abs()));
        }

        #[test]
        fn mirror_symmetry(l in state(), r in state()) {
            let params = p();
            let f = hllc_flux(&RiemannData::new(l, r), &params).unwrap();
            let ml = ConservedState::new(r.h, -r.hu, r.hv);
            let mr = ConservedState::new(l.h, -l.hu, l.hv);
            let g = hllc_flux(&RiemannData::new(ml, mr), &params).unwrap();
            prop_assert!((f.mass + g.mass).abs() <= 1e-12 * (1.0 + f.mass.abs()));
            prop_assert!((f.mom_x - g.mom_x).abs() <= 1e-12 * (1.0 + f.mom_x.abs()));
        }

        #[test]
        fn transverse_passivity(l in state(), r in state()) {
            let params = p();
            let d = RiemannData::new(l, r);
            let f = hllc_flux(&d, &params).unwrap();
            let s = wave_speeds(&d, &params).unwrap();
            let v = if s.left >= 0.0 || (s.right > 0.0 && s.star >= 0.0) { l.hv / l.h } else { r.hv / r.h };
            prop_assert!((f.mom_y - f.mass * v).abs() <= 1e-12 * (1.0 + f.mom_y.abs()));
        }

        #[test]
        fn wall_mass_exactly_zero(q in state()) {
            let f = wall_flux(q, &p()).unwrap();
            prop_assert_eq!(f.mass, 0.0);
            prop_assert_eq!(f.mom_y, 0.0);
        }

        #[test]
        fn newton_agrees_with_bisection(l in state(), r in state()) {
            let params = p();
            let d = RiemannData::new(l, r);
            if let (Ok(n), Ok(b)) = (star_state_newton(&d, &params), star_state_bisection(&d, &params)) {
                prop_assert!((n.h - b.h).abs() < 1e-10);
            }
        }
    }
}
