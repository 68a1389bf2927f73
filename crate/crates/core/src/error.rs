use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("vectors carry different scalar-product rules")]
    MetricMismatch,

    #[error("empty vector: dimension must be at least 1")]
    EmptyVector,

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("zero vector not allowed: {0}")]
    ZeroVector(&'static str),

    /// Clauses of one equivalence part disagree. This is a bug in the
    /// evaluation, never a property of the input.
    #[error(
        "internal consistency failure in part {part}: clause {clause} residual {residual:.3e} \
         exceeds {bound:.3e}"
    )]
    InternalConsistency {
        part: u8,
        clause: &'static str,
        residual: f64,
        bound: f64,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("a grid point coincides with the origin; singular operator `{0}` needs an offset grid")]
    OriginOnGrid(&'static str),

    #[error("operator `{op}` is not available: {reason}")]
    Unsupported { op: &'static str, reason: String },

    #[error("spatial dimension {got} too small, need at least {required}")]
    DimensionTooSmall { required: usize, got: usize },

    #[error("degenerate state: {0}")]
    Degenerate(String),

    #[error("box too small for the requested state: boundary mass estimate {boundary_mass:.3e}")]
    DomainTooSmall { boundary_mass: f64 },

    #[error("state is under-resolved: grid norm {grid_norm} vs target {target}")]
    UnderResolved { grid_norm: f64, target: f64 },

    #[error("state is not square integrable: {0}")]
    NotSquareIntegrable(String),

    #[error("no convergence after {iterations} iterations (value {value})")]
    NoConvergence { iterations: usize, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
