//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval: lo={lo} hi={hi}")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("breakpoints must be finite, strictly increasing and strictly inside the domain")]
    InvalidBreakpoints,

    #[error("values must be finite and match the breakpoint count")]
    InvalidValues,

    #[error("window [{lo}, {hi}] is not contained in the domain")]
    WindowOutsideDomain { lo: f64, hi: f64 },

    #[error("point {0} lies outside the domain closure")]
    PointOutsideDomain(f64),

    #[error("one-sided limit does not exist at {0}")]
    NoSidedLimit(f64),

    #[error("functions are defined on different domains")]
    DomainMismatch,

    #[error("L1 distance diverges: unbounded pieces with different values")]
    DivergingTail,

    #[error("grid spacing must be positive and finite, got {0}")]
    InvalidSpacing(f64),

    #[error("grid spacing mismatch: {0} vs {1}")]
    SpacingMismatch(f64, f64),

    #[error("empty value hull")]
    EmptyHull,

    #[error("state {0} outside tabulated flux range [{1}, {2}]")]
    StateOutsideRange(i64, i64, i64),

    #[error("evaluation point {0} outside tabulated flux range")]
    PointOutsideRange(f64),

    #[error("flux coefficients must be finite and non-empty")]
    InvalidCoefficients,

    #[error("time-dependent flux needs a splitting depth; none was given")]
    MissingDepth,

    #[error("event count exceeded the safety fuse ({fuse}) at t={time}: {detail}")]
    EventFuse { fuse: usize, time: f64, detail: String },

    #[error("internal consistency violation: {0}")]
    Internal(String),

    #[error("quadrature budget exceeded: {0} cells")]
    QuadratureBudget(usize),

    #[error("config error: {0}")]
    Config(String),

    #[error("artifact error: {0}")]
    Artifact(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
