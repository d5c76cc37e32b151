//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by constructors and fallible operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Polar/azimuthal angles outside `[0, pi] x [0, 2*pi)`.
    #[error("spherical angles out of range: theta={theta}, phi={phi} (need theta in [0, pi], phi in [0, 2*pi))")]
    AnglesOutOfRange { theta: f64, phi: f64 },

    /// A vector that is not unit length to within tolerance.
    #[error("direction ({x}, {y}, {z}) is not a unit vector (norm^2 = {norm_sq})")]
    NotUnitVector {
        x: f64,
        y: f64,
        z: f64,
        norm_sq: f64,
    },

    /// A probability outside `[0, 1]`.
    #[error("mixed profile ({p}, {q}) outside the unit square")]
    ProfileOutOfRange { p: f64, q: f64 },

    /// A payoff entry that is not finite.
    #[error("game payoff entries must be finite")]
    NonFinitePayoff,

    /// A correlation component outside `[-1, 1]`.
    #[error("correlation triple ({ab}, {ac}, {bc}) has a component outside [-1, 1]")]
    TripleOutOfRange { ab: f64, ac: f64, bc: f64 },

    /// Re-expression requested for a triple that satisfies the Bell bound.
    #[error("re-expression requires a Bell-violating triple (epsilon - sigma = {margin} >= 0)")]
    NotViolating { margin: f64 },

    /// A measurement session with no pairs.
    #[error("a measurement session needs at least one pair")]
    EmptySession,

    /// Too few samples in a tally bucket to form an estimate.
    #[error("bucket {bucket} has {count} pair(s); need at least 2 to estimate a correlation")]
    InsufficientBucket { bucket: &'static str, count: u64 },

    /// A malformed game description (file or inline).
    #[error("invalid game description: {0}")]
    InvalidGame(String),

    /// A malformed command-line value.
    #[error("invalid value for {flag}: {message}")]
    InvalidFlag { flag: &'static str, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
