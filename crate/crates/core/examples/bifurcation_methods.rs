//! Run one bifurcation preset with every junction strategy and with the 2D
//! reference solver, then compare the gauge series.
//!
//! cargo run --release --example bifurcation_methods [preset] [element size]
//!
//! The element size sets the 2D reference mesh, the 1D cells and the
//! Method B patches alike.

use shallow_junctions::config::StrategyName;
use shallow_junctions::presets::{preset, with_cell_size, with_method};
use shallow_junctions::simulation::gauges::series;
use shallow_junctions::simulation::run;

fn main() {
    env_logger::init();
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "test1_sub90".into());
    let h_ref: f64 = args.next().map_or(0.05, |s| s.parse().expect("element size"));
    let base = with_cell_size(preset(&name).expect("preset"), h_ref);

    let reference = run(&base.clone().as_reference(h_ref)).expect("reference run");
    println!(
        "{:>10} {:>8} steps {:>7} cells {:>9.3} s",
        "reference", reference.steps, reference.cells_2d, reference.timings.total
    );
    let gauges: Vec<String> = base.outputs.gauges.iter().map(|g| g.id.clone()).collect();
    for s in [StrategyName::MethodA, StrategyName::MethodB, StrategyName::Psfp] {
        match run(&with_cell_size(with_method(base.clone(), s), h_ref)) {
            Ok(rep) => {
                println!(
                    "{:>10} {:>8} steps {:>7} cells {:>9.3} s  volume error {:.2e}",
                    s.as_str(),
                    rep.steps,
                    rep.cells_1d + rep.cells_2d,
                    rep.timings.total,
                    rep.volume_error
                );
                for g in &gauges {
                    let a = series(&rep.gauges, g);
                    let r = series(&reference.gauges, g);
                    let err = a
                        .iter()
                        .map(|&(t, h)| (h - shallow_junctions::simulation::gauges::sample_at(&r, t)).abs())
                        .fold(0.0, f64::max);
                    let peak = r.iter().map(|p| p.1).fold(0.0, f64::max);
                    println!("    {g:>10}: max |h - h_ref| = {err:.4} m ({:.2}% of peak)", 100.0 * err / peak);
                }
            }
            Err(f) => println!("{:>10} failed: {f}", s.as_str()),
        }
    }
}
