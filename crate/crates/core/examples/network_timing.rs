//! Wall-clock cost of the ladder network under every treatment.
//!
//! cargo run --release --example network_timing [t_end] [reference element size]

use shallow_junctions::config::StrategyName;
use shallow_junctions::presets::{preset, with_method};
use shallow_junctions::simulation::run;

fn main() {
    let mut args = std::env::args().skip(1);
    let t_end: f64 = args.next().map_or(5.0, |s| s.parse().expect("t_end"));
    let h: f64 = args.next().map_or(0.05, |s| s.parse().expect("element size"));
    let mut cfg = preset("test6_network").expect("preset");
    cfg.outputs.t_end = t_end;
    let runs = [
        ("method_a", with_method(cfg.clone(), StrategyName::MethodA)),
        ("method_b", with_method(cfg.clone(), StrategyName::MethodB)),
        ("psfp", with_method(cfg.clone(), StrategyName::Psfp)),
        ("reference", cfg.clone().as_reference(h)),
    ];
    for (name, c) in runs {
        match run(&c) {
            Ok(r) => println!(
                "{name:>9}: {:>6} steps {:>6} cells {:>9.3} s (1D {:.3}, zones {:.3}, psfp {:.3}, 2D {:.3})",
                r.steps,
                r.cells_1d + r.cells_2d,
                r.timings.total,
                r.timings.channels_1d,
                r.timings.junction_zones,
                r.timings.psfp,
                r.timings.reference_2d
            ),
            Err(f) => println!("{name:>9}: {f}"),
        }
    }
}
