use thiserror::Error;

/// Errors raised by the geometry kernel, the curve combinatorics and the
/// metric estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("isometry is not hyperbolic (|trace| = {trace})")]
    NotHyperbolic { trace: f64 },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("collar is empty: core length {core} is not below boundary length {boundary}")]
    CollarEmpty { core: f64, boundary: f64 },

    #[error("arc lies in a pair of pants; no non-peripheral curve can replace it")]
    PantsCase,

    #[error("arc-to-curve gap {gap} exceeds bound {bound}")]
    BoundViolated { gap: f64, bound: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid curve class: {0}")]
    InvalidCurve(String),

    #[error("invalid marking: {0}")]
    InvalidMarking(String),

    #[error("invalid Fenchel-Nielsen coordinates: {0}")]
    InvalidFn(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("candidate set cannot complete a marking")]
    InsufficientCandidates,

    #[error("curve {curve} has length {length} above the thin threshold {threshold}")]
    NotThin {
        curve: String,
        length: f64,
        threshold: f64,
    },

    #[error("annulus points live in different spaces (boundary lengths {0} and {1})")]
    MismatchedSpace(f64, f64),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
