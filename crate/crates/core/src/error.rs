use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("variable index {index} out of range for {num_vars} variables")]
    VariableOutOfRange { index: usize, num_vars: usize },

    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("the zero polynomial has no finite root set")]
    ZeroPolynomial,

    #[error("ill-conditioned polynomial: {0}")]
    IllConditioned(String),

    #[error("root collision while tracking near s = {s:.6}; perturb the path")]
    Collision { s: f64 },

    #[error("degree dropped along the path at s = {s:.6}: {from} -> {to}")]
    DegreeDrop { s: f64, from: usize, to: usize },

    #[error("center is not on the variety: |P(center)| = {residual:e}")]
    CenterOffVariety { residual: f64 },

    #[error("defining polynomial does not depend on the fiber variable")]
    FiberIndependent,

    #[error("projection is not proper over the trial polydisk: {0}")]
    NotProper(String),

    #[error("base point lies outside the chart (|x'| = {norm:e} > r' = {radius:e})")]
    OutsideChart { norm: f64, radius: f64 },

    #[error("sheet count unstable across random frames: {0:?}")]
    UnstableMultiplicity(Vec<usize>),

    #[error("too few valid samples: {got} < {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("too few lines survived discriminant filtering: {got} < {need}")]
    TooFewLines { got: usize, need: usize },

    #[error("function vanishes identically on a branch of the germ")]
    VanishesIdentically,

    #[error("tracking failed on {failed} of {total} lines")]
    TrackingFailures { failed: usize, total: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
