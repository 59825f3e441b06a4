//! Shallow-water flow in networks of straight channels.
//!
//! Channels are solved with a second-order 1D finite-volume scheme and meet
//! at junctions treated in one of three ways: a single polygonal 2D element,
//! a local unstructured 2D patch, or an algebraic star-state solve. A full 2D
//! unstructured solver over the network footprint serves as reference.
//!
//! Most users start from [`simulation::Simulation`] built from a
//! [`config::ScenarioConfig`] or one of the [`presets`].

pub mod config;
pub mod error;
pub mod geometry;
pub mod junctions;
pub mod presets;
pub mod psfp;
pub mod riemann;
pub mod scheme1d;
pub mod scheme2d;
pub mod simulation;
pub mod studies;
pub mod swe;

pub use error::{Error, Result};
