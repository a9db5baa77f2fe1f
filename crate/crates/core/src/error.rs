use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },

    #[error("division by zero")]
    DivisionByZero,

    #[error("exact mode requested on an expression containing exp/log")]
    TranscendentalInExactMode,

    #[error("non-finite value encountered")]
    NonFinite,

    #[error("point has {got} coordinates, expected {expected}")]
    PointDimension { expected: usize, got: usize },

    #[error("point lies on the excluded locus")]
    OnExcludedLocus,

    #[error("asymmetric Christoffel symbol: Γ_{i}{j}^{k} differs from Γ_{j}{i}^{k}")]
    Asymmetric { i: usize, j: usize, k: usize },

    #[error("bad dimension: {0}")]
    BadDimension(String),

    #[error("invalid manifold document: {0}")]
    Document(String),

    #[error("could not draw a sample point: {0}")]
    Sampling(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("degenerate metric")]
    DegenerateMetric,

    #[error("invalid parameters: {0}")]
    Params(String),
}

pub type Result<T> = std::result::Result<T, Error>;
