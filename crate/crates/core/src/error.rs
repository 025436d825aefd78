use thiserror::Error;

/// Errors raised by the isolab library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("invalid group specification: {0}")]
    InvalidSpec(String),

    #[error("invalid generating set: {0}")]
    InvalidGenerators(String),

    #[error("ball exceeds the vertex cap of {cap} vertices")]
    CapExceeded { cap: usize },

    #[error("enumeration exceeded its node budget of {budget}")]
    BudgetExceeded { budget: u64 },

    #[error("vertex {vertex} is not interior (sphere {sphere}, ball radius {radius})")]
    NotInterior {
        vertex: usize,
        sphere: u32,
        radius: u32,
    },

    #[error("vertex set is empty")]
    EmptySet,

    #[error("vertex {0} is out of range")]
    OutOfRange(usize),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("problem too large for the dense solver: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
