use thiserror::Error;

/// Errors raised by the clustering engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("data range may only grow (feature {feature})")]
    ShrinkingRange { feature: usize },

    #[error("cannot split {part} samples out of a cluster holding {whole}")]
    InvalidSplit { whole: usize, part: usize },

    #[error("internal consistency violated: {0}")]
    Inconsistent(String),

    #[error("input contains a non-finite value at feature {feature}")]
    NonFinite { feature: usize },

    #[error("index value is not defined with fewer than two clusters")]
    Undefined,

    #[error("model has no categories")]
    EmptyModel,

    #[error("label length mismatch: {left} vs {right}")]
    LabelLengthMismatch { left: usize, right: usize },

    #[error("at least two labels are required")]
    TooFewLabels,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
