use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("theta = {0} lies outside the manifold range [0, pi]")]
    ThetaOutOfRange(f64),

    #[error("Hamiltonian is degenerate at theta = {theta} (|h| = {norm:e} rad/s); Berry curvature is undefined there")]
    Degenerate { theta: f64, norm: f64 },

    #[error("state is not normalized (norm deviation {0:e})")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("integration step too coarse: norm drift {drift:e}; use at least {suggested_steps} steps")]
    StepTooCoarse { drift: f64, suggested_steps: usize },

    #[error("density matrix lost positivity at t = {time:e} s (min eigenvalue {min_eigenvalue:e})")]
    PositivityViolation { time: f64, min_eigenvalue: f64 },

    #[error("curvature profile needs at least 3 samples, got {0}")]
    InsufficientSamples(usize),

    #[error("curvature profile must span [0, pi]; got [{first}, {last}]")]
    NotSpanning { first: f64, last: f64 },

    #[error("curvature profile theta samples are not strictly increasing at index {0}")]
    NotIncreasing(usize),

    #[error("lattice too coarse: plaquette phase {max_phase} too close to +-pi; refine the grid")]
    GridTooCoarse { max_phase: f64 },

    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("sweep `{0}` has no values")]
    EmptySweep(&'static str),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
