use thiserror::Error;

use crate::psfp::PsfpFailure;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Primitive variables requested for a depth at or below the dry tolerance.
    #[error("dry state: depth {h:e} m is at or below the dry tolerance")]
    DryState { h: f64 },

    #[error("positivity failure in {location}: depth {h:e} m after update")]
    Positivity { location: String, h: f64 },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("mesh parse error at line {line}: {message}")]
    MeshParse { line: usize, message: String },

    #[error("non-manifold edge ({a}, {b}) shared by more than two triangles")]
    NonManifoldEdge { a: usize, b: usize },

    #[error("inconsistent orientation at triangle {triangle}: {message}")]
    InconsistentOrientation { triangle: usize, message: String },

    #[error("exact Riemann solver: {0}")]
    Riemann(String),

    #[error("junction solver failure at junction {junction} (t = {time} s): {failure}")]
    Psfp {
        junction: String,
        time: f64,
        failure: PsfpFailure,
    },

    #[error("zero time step at t = {0} s")]
    ZeroTimeStep(f64),

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("invalid configuration: {}", .0.join("; "))]
    ConfigInvalid(Vec<String>),

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Problems with the input (files, geometry, settings) as opposed to
    /// failures of the numerics during a run.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::ConfigParse(_)
                | Error::ConfigInvalid(_)
                | Error::UnknownPreset(_)
                | Error::MeshParse { .. }
                | Error::NonManifoldEdge { .. }
                | Error::InconsistentOrientation { .. }
                | Error::DegenerateGeometry(_)
                | Error::Io(_)
        )
    }
}
