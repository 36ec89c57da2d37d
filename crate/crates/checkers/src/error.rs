use thiserror::Error;

/// Errors reported by the library.
///
/// Callers that map errors onto process exit codes should treat `Io` as an
/// I/O failure and every other variant as input validation.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Time slices are indexed from 1.
    #[error("time slice t={t} is out of range; t must be >= 1")]
    TimeOutOfRange { t: i64 },

    /// The request exceeds a configured resource cap.
    #[error("{what} requires t <= {cap}, got t={t}")]
    ResourceExceeded {
        what: &'static str,
        t: i64,
        cap: i64,
    },

    /// A row built under one arithmetic mode was used with parameters
    /// describing another.
    #[error("row arithmetic mode does not match the supplied parameters")]
    ModeMismatch,

    /// The diamond identities only apply on two congruence classes.
    #[error(
        "point (x={x}, t={t}) violates the congruence precondition: \
         (x mod 4, t mod 4) must be (2, 1) or (0, 3)"
    )]
    CongruenceViolation { x: i64, t: i64 },

    /// A strict edge assignment has no value for a required edge.
    #[error("edge field has no value at midpoint ({}, {})", *x2 as f64 / 2.0, *t2 as f64 / 2.0)]
    MissingEdge { x2: i64, t2: i64 },

    /// An edge-assignment file failed to parse.
    #[error("field file line {line}: {message}")]
    FieldFile { line: usize, message: String },

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
