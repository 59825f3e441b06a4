//! Measured order of accuracy of the 1D scheme on a smooth hump of water,
//! first and second order.
//!
//! cargo run --release --example convergence

use shallow_junctions::studies::{convergence_order, SmoothProblem};

fn main() {
    let problem = SmoothProblem::default();
    for order in [1, 2] {
        let r = convergence_order(&problem, 4, order).expect("convergence study");
        println!("order {order}");
        print!("{}", r.to_csv());
    }
}
