use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("conformability error: {0}")]
    Conformability(String),

    /// An operator that should be A-linear carries weight off the
    /// left-multiplication block pattern.
    #[error("structure error: off-pattern mass {mass:.3e} exceeds limit {limit:.3e}")]
    Structure { mass: f64, limit: f64 },

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("degenerate decomposition: {0}")]
    DegenerateDecomposition(String),

    #[error("singular block: {0}")]
    Singular(String),

    #[error("infeasible instance request: {0}")]
    Infeasible(String),

    #[error("generation failed for kind {kind} after {attempts} attempts")]
    GenerationFailure { kind: String, attempts: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn conform(msg: impl Into<String>) -> Error {
    Error::Conformability(msg.into())
}
