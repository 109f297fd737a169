use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vertex `{vertex}` has non-positive measure {value}")]
    NonPositiveMeasure { vertex: String, value: f64 },

    #[error("self-loop at vertex `{0}`")]
    SelfLoop(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),

    #[error("duplicate edge `{0}` -- `{1}`")]
    DuplicateEdge(String, String),

    #[error("negative weight {value} on {what}")]
    NegativeWeight { what: String, value: f64 },

    #[error("non-finite value on {0}")]
    NonFinite(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("form is not irreducible")]
    NotIrreducible,

    #[error("conductance graph is not connected")]
    NotConnected,

    #[error("form has killing at vertex `{0}`")]
    HasKilling(String),

    #[error("form is not recurrent")]
    NotRecurrent,

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("negative entry {value} at vertex index {index}")]
    NegativeInput { index: usize, value: f64 },

    #[error("function is not excessive: min (Lh)(x) = {0:e}")]
    NotExcessive(f64),

    #[error("function is not strictly positive")]
    NonPositive,

    #[error("operator does not intertwine the generators: residual {residual:e} > {bound:e}")]
    NotIntertwining { residual: f64, bound: f64 },

    #[error("operator leaves the Markovian class: {0}")]
    NotMarkovian(String),

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("invalid transformation: {0}")]
    InvalidTransformation(String),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
