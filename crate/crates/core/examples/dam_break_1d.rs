//! Dam break in one closed channel against the exact Riemann solution.
//!
//! cargo run --release --example dam_break_1d

use shallow_junctions::riemann::{exact_riemann, RiemannData};
use shallow_junctions::studies::SmoothProblem;
use shallow_junctions::swe::{ConservedState, PhysicalParams};
use shallow_junctions::simulation::Simulation;

fn main() {
    let (hl, hr, t_end) = (1.0, 0.5, 0.5);
    let problem = SmoothProblem { t_end, ..SmoothProblem::default() };
    let params = PhysicalParams::default();
    let data = RiemannData::new(ConservedState::at_rest(hl), ConservedState::at_rest(hr));
    for order in [1, 2] {
        let cells = 400;
        let mut sim = Simulation::new(&problem.config(cells, order)).expect("scenario");
        let mid = 0.5 * problem.length;
        sim.set_channel_state(0, |a, _| ConservedState::at_rest(if a < mid { hl } else { hr }));
        sim.run().expect("run");
        let dx = problem.length / cells as f64;
        let l1: f64 = sim.channels[0]
            .field
            .cells
            .iter()
            .enumerate()
            .map(|(i, q)| {
                let x = (i as f64 + 0.5) * dx - mid;
                (q.h - exact_riemann(&data, &params, x / t_end).expect("exact").h).abs() * dx
            })
            .sum();
        println!("order {order}: {cells} cells, L1 depth error {l1:.3e} m^2");
    }
}
