use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("distribution has span {span}; this operation needs span 1")]
    SpanNotOne { span: u64 },

    #[error("survival table needs {required} cells but the memory budget is {budget}")]
    MemoryBudget { required: usize, budget: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The Wiener-Hopf root split could not be carried out (periodic walk with
    /// unit-circle roots, coincident roots, or a failed root polish).
    #[error("fluctuation solver unsupported for this distribution: {0}")]
    Unsupported(String),

    #[error("invalid Monte Carlo configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
