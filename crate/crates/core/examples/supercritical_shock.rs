//! Supercritical shock into a 90 degree bifurcation: both element methods
//! complete while the algebraic junction solver stops.
//!
//! cargo run --release --example supercritical_shock

use shallow_junctions::config::StrategyName;
use shallow_junctions::presets::{preset, with_method};
use shallow_junctions::simulation::Simulation;

fn main() {
    let base = preset("test4_super90").expect("preset");
    for s in [StrategyName::MethodA, StrategyName::MethodB, StrategyName::Psfp] {
        let mut sim = Simulation::new(&with_method(base.clone(), s)).expect("scenario");
        match sim.run() {
            Ok(rep) => println!(
                "{:>9}: {} steps, min depth {:.4} m, volume error {:.1e}",
                s.as_str(),
                rep.steps,
                sim.min_depth(),
                rep.volume_error
            ),
            Err(f) => println!("{:>9}: {f}", s.as_str()),
        }
    }
}
