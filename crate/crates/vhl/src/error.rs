use thiserror::Error;

/// Error type shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("singular evaluation: kernel requested at x = y")]
    SingularEvaluation,

    #[error("evaluation point is on the boundary or outside the domain")]
    OutsideDomain,

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    #[error("invalid mesh: {0}")]
    Mesh(String),

    #[error("matrix not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("exponent fit: {0}")]
    Fit(String),

    #[error("oscillation layer {layer} contains no mesh nodes")]
    EmptyLayer { layer: usize },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
