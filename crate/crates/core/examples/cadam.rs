//! Dam break through a 45 degree bend, with gauge depths written as CSV.
//!
//! cargo run --release --example cadam [method_a|method_b] > cadam.csv

use shallow_junctions::config::StrategyName;
use shallow_junctions::presets::{preset, with_method};
use shallow_junctions::simulation::{run, write_gauges_csv};

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "method_a".into());
    let strategy = StrategyName::parse(&name).expect("strategy");
    let rep = run(&with_method(preset("test5_cadam").expect("preset"), strategy)).expect("run");
    eprintln!("{} steps, volume error {:.1e}", rep.steps, rep.volume_error);
    write_gauges_csv(&rep.gauges, std::io::stdout().lock()).expect("write");
}
