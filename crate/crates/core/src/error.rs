//! Error type shared by every fallible operation in the crate.

use thiserror::Error;

/// Unified error for exact-arithmetic, orbit, and experiment operations.
#[derive(Debug, Error)]
pub enum Error {
    /// An input value lies outside the mathematical domain of the operation
    /// (e.g. a reducible fraction where a unit fraction is required, a square
    /// discriminant where an irrational is required).
    #[error("domain error: {0}")]
    Domain(String),

    /// A structurally valid input fails a consistency check (e.g. an
    /// inadmissible digit vector, a reference value that does not match the
    /// table it is checked against).
    #[error("validation error: {0}")]
    Validation(String),

    /// A table or digit stream is too short for the requested index and
    /// cannot be extended.
    #[error("length error: {0}")]
    Length(String),

    /// A requested index or size exceeds the certified range of a context.
    #[error("range error: {0}")]
    Range(String),

    /// The operation's work estimate exceeds the configured budget, or a
    /// bounded scan failed to terminate within it.
    #[error("budget error: {0}")]
    Budget(String),

    /// An angle construction found no admissible digit at some level.
    #[error("construction failed at level {level}: {msg}")]
    Construction { level: usize, msg: String },

    /// A stated precondition of an experiment or checker does not hold.
    #[error("precondition error: {0}")]
    Precondition(String),

    /// Malformed textual input (angle, observable, rule, or window grammar).
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code convention: validation-class failures map to 2,
    /// budget exhaustion to 3.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget(_) => 3,
            _ => 2,
        }
    }
}
