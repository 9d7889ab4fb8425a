//! Error type shared across the crate.
//!
//! Everything fallible returns [`Result`]. Variants are grouped by how the
//! command-line front end maps them to exit codes: input parsing, solver
//! trouble, and domain violations (bad matrices, empty sets, out-of-range
//! arguments).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    // ---- shape and validation -------------------------------------------
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("dimension {0} exceeds the supported cap of {max}", max = crate::linalg::MAX_DIM)]
    DimensionCap(usize),

    #[error("matrix is not Hermitian (deviation {0:.3e} exceeds tolerance)")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("trace is {0:.17} but must be 1 within tolerance")]
    TraceNotOne(f64),

    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),

    // ---- parsing ---------------------------------------------------------
    #[error("parse error: {0}")]
    Parse(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    // ---- witnesses -------------------------------------------------------
    #[error("operator is not a coherence witness: {0}")]
    NotAWitness(String),

    #[error("state is incoherent within tolerance; nothing to witness")]
    IncoherentInput,

    #[error("no sampled state fell in the detection set within the budget")]
    EmptyDetectionSet,

    // ---- solvers ---------------------------------------------------------
    #[error(
        "solver did not converge after {iterations} iterations \
         (best value {best_value:.12e}, best bound {best_bound:.12e})"
    )]
    NonConvergence {
        iterations: usize,
        best_value: f64,
        best_bound: f64,
    },

    #[error("linear program is infeasible or unbounded: {0}")]
    LinearProgram(String),

    #[error("bound witness rejected: {0}")]
    InvalidBoundWitness(String),

    // ---- channels --------------------------------------------------------
    #[error("Kraus operators do not form an incoherent channel: {0}")]
    NotIncoherentChannel(String),

    // ---- tomography and scheduling ----------------------------------------
    #[error("sampled record has zero standard error; cannot run a z-test")]
    ZeroStderr,

    #[error("count record is unusable: {0}")]
    BadCounts(String),

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
