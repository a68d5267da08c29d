use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("packing construction failed: reached {reached} of {target} vertices after {draws} draws")]
    ConstructionFailed {
        target: usize,
        reached: usize,
        draws: usize,
    },
    #[error("invalid sparsity k={k} for dimension d={d} (need 1 <= k <= d/2)")]
    InvalidSparsity { d: usize, k: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),
    #[error("vertex is not compatible with the class: {0}")]
    IncompatibleVertex(String),
    #[error("point outside the domain: coordinate {index} = {value} exceeds radius {radius}")]
    OutOfDomain {
        index: usize,
        value: f64,
        radius: f64,
    },
    #[error("instances do not share a class specification")]
    SpecMismatch,
    #[error("dimension {dim} too large for brute force (max {max})")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("invalid grid step {step} for radius {radius}")]
    InvalidGrid { step: f64, radius: f64 },
    #[error("need at least {need} instances, got {got}")]
    TooFewInstances { need: usize, got: usize },
    #[error("operation requires a {expected} class")]
    WrongKind { expected: &'static str },
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("inner mirror step did not converge after {iters} iterations (residual {residual:e})")]
    InnerSolveFailed { iters: usize, residual: f64 },
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("rate fit needs at least 3 points, got {0}")]
    InsufficientPoints(usize),
    #[error("non-positive gap {gap} at axis value {at}")]
    NonPositiveGap { at: f64, gap: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
