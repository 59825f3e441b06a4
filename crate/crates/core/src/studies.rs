//! Refinement harnesses: the grid-independence table of gauge integrals and
//! the measured order of accuracy of the 1D scheme.

use std::fmt::Write as _;

use serde::Serialize;

use crate::config::{ChannelConfig, FlowState, GaugeConfig, InitialConfig, NodeConfig, NumericsConfig, OutputConfig, PhysicsConfig, ScenarioConfig};
use crate::error::{Error, Result};
use crate::simulation::boundary::BoundaryCondition;
use crate::simulation::engine::{RunFailure, Simulation};
use crate::simulation::gauges::{series, time_integral};
use crate::swe::ConservedState;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridLevel {
    pub element_size: f64,
    pub cells: usize,
    pub steps: usize,
    /// Time integral of the gauge elevation above its initial value [m s].
    pub integral: f64,
    /// `|I_k - I_{k-1}| / |I_k|`; none on the coarsest level.
    pub relative_difference: Option<f64>,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridStudy {
    pub scenario: String,
    pub gauge: String,
    pub levels: Vec<GridLevel>,
}

impl GridStudy {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("element_size,cells,steps,integral,relative_difference,seconds\n");
        for l in &self.levels {
            let d = l.relative_difference.map_or(String::new(), |d| d.to_string());
            let _ = writeln!(out, "{},{},{},{},{},{}", l.element_size, l.cells, l.steps, l.integral, d, l.seconds);
        }
        out
    }

    pub fn relative_differences(&self) -> Vec<f64> {
        self.levels.iter().filter_map(|l| l.relative_difference).collect()
    }
}

/// Run the 2D reference solver of `base` at each element size (coarsest
/// first) and tabulate the gauge integral per level.
pub fn grid_independence(
    base: &ScenarioConfig,
    sizes: &[f64],
    gauge: &str,
) -> std::result::Result<GridStudy, Box<RunFailure>> {
    let mut levels: Vec<GridLevel> = Vec::with_capacity(sizes.len());
    for &h in sizes {
        let cfg = base.clone().as_reference(h);
        let rep = crate::simulation::run(&cfg)?;
        let s = series(&rep.gauges, gauge);
        let h0 = s.first().map_or(0.0, |p| p.1);
        let shifted: Vec<(f64, f64)> = s.iter().map(|&(t, v)| (t, v - h0)).collect();
        let integral = time_integral(&shifted);
        let relative_difference = levels.last().map(|prev| {
            if integral == prev.integral {
                0.0
            } else {
                (integral - prev.integral).abs() / integral.abs()
            }
        });
        log::info!("grid level {h}: {} cells, integral {integral:.6}", rep.cells_2d);
        levels.push(GridLevel {
            element_size: h,
            cells: rep.cells_2d,
            steps: rep.steps,
            integral,
            relative_difference,
            seconds: rep.timings.total,
        });
    }
    Ok(GridStudy { scenario: base.name.clone(), gauge: gauge.into(), levels })
}

/// A single closed channel with a Gaussian hump of water at rest; smooth
/// over the default horizon.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothProblem {
    pub length: f64,
    pub depth: f64,
    pub amplitude: f64,
    pub hump_width: f64,
    pub cells: usize,
    pub t_end: f64,
    pub cfl: f64,
}

impl Default for SmoothProblem {
    fn default() -> Self {
        SmoothProblem { length: 10.0, depth: 1.0, amplitude: 0.05, hump_width: 1.0, cells: 50, t_end: 1.0, cfl: 0.9 }
    }
}

impl SmoothProblem {
    pub fn depth_at(&self, s: f64) -> f64 {
        let x = (s - 0.5 * self.length) / self.hump_width;
        self.depth + self.amplitude * (-x * x).exp()
    }

    pub fn config(&self, cells: usize, order: u8) -> ScenarioConfig {
        let node = |id: &str, x: f64| NodeConfig { id: id.into(), x, y: 0.0, boundary: Some(BoundaryCondition::Reflective), junction: None };
        ScenarioConfig {
            name: format!("smooth_{cells}"),
            metadata: Default::default(),
            nodes: vec![node("a", 0.0), node("b", self.length)],
            channels: vec![ChannelConfig { id: "c".into(), from: "a".into(), to: "b".into(), width: 1.0, cells }],
            initial: InitialConfig { default: FlowState { h: self.depth, u: 0.0 }, channels: vec![], junctions: vec![] },
            physics: PhysicsConfig::default(),
            numerics: NumericsConfig { order, cfl_1d: self.cfl, ..NumericsConfig::default() },
            outputs: OutputConfig { t_end: self.t_end, stride: usize::MAX, gauges: vec![GaugeConfig::on_channel("mid", "c", 0.5 * self.length)] },
            base_dir: None,
        }
    }

    /// Final cells on a grid of `cells` cells.
    pub fn solve(&self, cells: usize, order: u8) -> Result<Vec<ConservedState>> {
        let mut sim = Simulation::new(&self.config(cells, order))?;
        sim.set_channel_state(0, |a, b| ConservedState::at_rest(cell_average(|s| self.depth_at(s), a, b)));
        sim.run().map_err(|f| f.error)?;
        Ok(sim.channels[0].field.cells.clone())
    }
}

/// Five-point Gauss-Legendre average of `f` over `[a, b]`.
pub fn cell_average(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const X: [f64; 5] = [0.0, 0.538_469_310_105_683_1, -0.538_469_310_105_683_1, 0.906_179_845_938_664, -0.906_179_845_938_664];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_47,
        0.478_628_670_499_366_47,
        0.236_926_885_056_189_08,
        0.236_926_885_056_189_08,
    ];
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    0.5 * X.iter().zip(W).map(|(x, w)| w * f(m + r * x)).sum::<f64>()
}

/// Refinement of the convergence reference over the finest level.
pub const REFERENCE_FACTOR: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub order: u8,
    pub cells: Vec<usize>,
    /// L1 depth error of each level against the finest solution.
    pub errors: Vec<f64>,
    /// `log2(e_k / e_{k+1})` for consecutive levels.
    pub orders: Vec<f64>,
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("cells,l1_error,observed_order\n");
        for (k, (n, e)) in self.cells.iter().zip(&self.errors).enumerate() {
            let o = if k == 0 { String::new() } else { self.orders[k - 1].to_string() };
            let _ = writeln!(out, "{n},{e},{o}");
        }
        out
    }
}

/// Solve `problem` on `levels` grids doubling from `problem.cells` and
/// measure L1 orders against a reference solution on a grid
/// `REFERENCE_FACTOR` times finer than the finest level. A reference only
/// twice as fine biases a first-order estimate up to about 1.6.
pub fn convergence_order(problem: &SmoothProblem, levels: usize, order: u8) -> Result<ConvergenceReport> {
    if levels < 2 {
        return Err(Error::ConfigInvalid(vec!["convergence study needs at least 2 levels".into()]));
    }
    let cells: Vec<usize> = (0..levels).map(|k| problem.cells << k).collect();
    let finest_n = (problem.cells << (levels - 1)) * REFERENCE_FACTOR;
    let finest = problem.solve(finest_n, order)?;
    let dx_f = problem.length / finest_n as f64;
    let mut errors = Vec::with_capacity(levels);
    for &n in &cells {
        let q = problem.solve(n, order)?;
        let r = finest_n / n;
        let dx = problem.length / n as f64;
        let e: f64 = q
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let avg = finest[i * r..(i + 1) * r].iter().map(|f| f.h).sum::<f64>() * dx_f / dx;
                (c.h - avg).abs() * dx
            })
            .sum();
        errors.push(e);
    }
    let orders = errors
        .windows(2)
        .map(|w| if w[1] == 0.0 { f64::NAN } else { (w[0] / w[1]).log2() })
        .collect();
    Ok(ConvergenceReport { order, cells, errors, orders })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_average_is_exact_for_polynomials() {
        let f = |x: f64| 3.0 * x.powi(8) - x.powi(3) + 2.0;
        // exact average over [0, 2]: (3 * 2^9 / 9 - 2^4 / 4 + 4) / 2
        let exact = (3.0 * 512.0 / 9.0 - 4.0 + 4.0) / 2.0;
        assert!((cell_average(f, 0.0, 2.0) - exact).abs() < 1e-12);
    }

    #[test]
    fn constant_data_has_zero_error() {
        let p = SmoothProblem { amplitude: 0.0, cells: 10, ..SmoothProblem::default() };
        let r = convergence_order(&p, 3, 2).unwrap();
        assert!(r.errors.iter().all(|&e| e < 1e-14), "{:?}", r.errors);
    }

    #[test]
    fn identical_levels_have_zero_difference() {
        let base = crate::presets::preset("appB_gridstudy").unwrap();
        let mut short = base.clone();
        short.outputs.t_end = 0.05;
        let study = grid_independence(&short, &[0.2, 0.2], "ch1_near").unwrap();
        assert_eq!(study.relative_differences(), vec![0.0]);
        assert!(study.to_csv().starts_with("element_size,cells,steps,integral,relative_difference,seconds\n"));
    }
}
