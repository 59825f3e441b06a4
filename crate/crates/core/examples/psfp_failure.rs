//! The algebraic junction solver on compatible data and on the classical
//! failing case with a supercritical-leaning parent channel.
//!
//! cargo run --release --example psfp_failure

use shallow_junctions::psfp::{psfp_residual, psfp_solve, JunctionOrientation, PsfpProblem};
use shallow_junctions::swe::PhysicalParams;

fn main() {
    let params = PhysicalParams::default();
    let cases = [
        ("compatible", PsfpProblem::new([0.4, 0.2, 0.2], [0.16; 3], [0.3; 3], JunctionOrientation::Diverging)),
        ("near-still", PsfpProblem::new([0.4, 0.3, 0.3], [0.16, 0.15, 0.15], [0.1, 0.0, 0.0], JunctionOrientation::Diverging)),
        ("failing", PsfpProblem::new([0.4, 0.3, 0.3], [0.2, 0.1, 0.1], [0.96, 0.08, 0.08], JunctionOrientation::Diverging)),
    ];
    for (name, p) in cases {
        match psfp_solve(&p, &params) {
            Ok(s) => {
                let r = psfp_residual(&s.state, &p, &params).expect("residual");
                println!("{name}: converged in {} iterations, h* = {:.5?}, u* = {:.5?}", s.iterations, s.state.h, s.state.u);
                println!("    residual {:.1e}", r.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
            }
            Err(e) => {
                println!("{name}: {}", e.failure);
                println!("    residual trace {:.4?}", e.trace);
            }
        }
    }
}
