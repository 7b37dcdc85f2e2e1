use thiserror::Error;

/// Errors raised by geometry construction, assembly, solves and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate hole: {0}")]
    DegenerateHole(String),

    #[error("separation violated: {0}")]
    SeparationViolated(String),

    #[error("not admissible: {0}")]
    NotAdmissible(String),

    #[error("near-singular evaluation unsupported: point {x:?} is within {distance:.3e} of a boundary (margin {margin:.3e})")]
    NearSingular {
        x: [f64; 2],
        distance: f64,
        margin: f64,
    },

    #[error("point {0:?} lies outside the evaluation domain")]
    OutsideDomain([f64; 2]),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("consistency check failed: {0}")]
    Inconsistent(String),

    #[error("regime mismatch: {0}")]
    Regime(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
