//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("unknown cell id {0}")]
    UnknownCell(u32),

    #[error("cell {0} has no neighbors")]
    IsolatedCell(u32),

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("dyadic level {0} outside the representable range")]
    DyadicRange(i64),

    #[error("solver did not converge: residual {residual:.3e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("{0} interior cells have no path to the boundary set")]
    DisconnectedInterior(usize),

    #[error("missing field value for cell {0}")]
    MissingValue(u32),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("environment file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
