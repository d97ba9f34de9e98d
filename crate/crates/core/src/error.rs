use thiserror::Error;

use crate::linalg::Vec3;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("switching plane normal has zero magnitude")]
    ZeroNormal,

    #[error("no piece of the system covers the point {point}")]
    NoMatchingRegion { point: Vec3 },

    #[error("zero is not a simple eigenvalue of the matrix")]
    NotSingleZeroEigenvalue,

    #[error("trajectory diverged at t = {time}: |x| = {norm:e} exceeds bound {bound:e}")]
    Divergence { time: f64, norm: f64, bound: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("dimension error at `{path}`: expected 3x3 matrix, {found}")]
    Dimension { path: String, found: String },

    #[error("degenerate series: mean-square displacement has zero variance")]
    DegenerateSeries,

    #[error("trajectory has no samples")]
    EmptyTrajectory,

    #[error("series too short: need {needed} samples, have {available}")]
    SeriesTooShort { needed: usize, available: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by malformed user input rather than numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::ZeroNormal
                | Error::InvalidConfig(_)
                | Error::Schema { .. }
                | Error::Dimension { .. }
                | Error::SeriesTooShort { .. }
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}
