//! Time stepping over a whole network.

pub mod boundary;
pub mod engine;
pub mod gauges;

pub use boundary::{apply_boundary, BoundaryCondition};
pub use engine::{run, RunFailure, RunReport, Simulation, Snapshot, Timings};
pub use gauges::{write_gauges_csv, GaugeRecord, GAUGE_HEADER};
