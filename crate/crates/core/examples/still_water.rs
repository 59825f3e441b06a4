//! Lake at rest on the full ladder network under both element methods:
//! the velocity stays at round-off.
//!
//! cargo run --release --example still_water

use shallow_junctions::config::StrategyName;
use shallow_junctions::presets::{preset, with_method};
use shallow_junctions::simulation::{BoundaryCondition, Simulation};

fn main() {
    for s in [StrategyName::MethodA, StrategyName::MethodB] {
        let mut cfg = with_method(preset("test6_network").expect("preset"), s);
        for n in &mut cfg.nodes {
            if n.boundary.is_some() {
                n.boundary = Some(BoundaryCondition::Reflective);
            }
        }
        cfg.initial.channels.clear();
        cfg.initial.default.u = 0.0;
        cfg.outputs.t_end = 1e6;
        let mut sim = Simulation::new(&cfg).expect("scenario");
        let v0 = sim.total_volume();
        for _ in 0..1000 {
            let dt = sim.compute_dt().expect("time step");
            sim.advance(dt).expect("step");
        }
        println!(
            "{:>9}: t = {:.2} s, max speed {:.2e} m/s, volume change {:.2e}",
            s.as_str(),
            sim.time(),
            sim.max_velocity(),
            (sim.total_volume() - v0) / v0
        );
    }
}
