//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate dark state: both Rabi frequencies are zero")]
    DegenerateDarkState,

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("no {0} feature found in scan")]
    NoFeature(&'static str),

    #[error("integration did not converge after {refinements} refinements (last change {last_change:.3e})")]
    NonConvergent { refinements: u32, last_change: f64 },

    #[error("numerical instability at step {step}: {diagnostic}")]
    Instability { step: usize, diagnostic: String },

    #[error("transverse grid too small: {0}")]
    GridTooSmall(String),

    #[error("fit did not converge after {iterations} iterations (last iterate {last:?})")]
    FitDidNotConverge { iterations: usize, last: Vec<f64> },

    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: parse/config problems and numeric
    /// failures get distinct codes so callers can tell them apart.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Scenario(_) | Error::InvalidParameter(_) => 2,
            Error::Io(_) => 1,
            _ => 3,
        }
    }
}
