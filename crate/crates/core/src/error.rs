//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by matrix kernels, state constructors and the optimizer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix too large: {rows}x{cols} exceeds max dimension {max}")]
    TooLarge {
        rows: usize,
        cols: usize,
        max: usize,
    },

    #[error("not Hermitian (max entrywise deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
