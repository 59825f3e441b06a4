//! Grid-independence table of a gauge integral on the 2D reference solver.
//!
//! cargo run --release --example grid_study [finest element size]

use shallow_junctions::presets::preset;
use shallow_junctions::studies::grid_independence;

fn main() {
    let finest: f64 = std::env::args().nth(1).map_or(0.02, |s| s.parse().expect("element size"));
    let cfg = preset("appB_gridstudy").expect("preset");
    let sizes: Vec<f64> = std::iter::successors(Some(0.16), |h| Some(h / 2.0)).take_while(|&h| h >= finest * 0.99).collect();
    let gauge = cfg.outputs.gauges[0].id.clone();
    match grid_independence(&cfg, &sizes, &gauge) {
        Ok(study) => print!("{}", study.to_csv()),
        Err(f) => eprintln!("{f}"),
    }
}
