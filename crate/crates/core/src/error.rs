use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate timescale: eps must be positive, got {0}")]
    DegenerateTimescale(f64),

    #[error("eps = {eps} outside the validity interval (0, {eps_max}]")]
    DomainUndefined { eps: f64, eps_max: f64 },

    #[error("unsupported operation: {0}")]
    Unsupported(&'static str),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("parameter `{name}` = {value} violates bound {bound}")]
    ParameterBound { name: String, value: f64, bound: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("point outside the slow domain U: {0}")]
    OutsideDomain(String),

    #[error("singular matrix")]
    Singular,

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        last_iterate: Vec<f64>,
    },

    #[error("trajectory left the domain at t = {0}")]
    LeftDomain(f64),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("eigenvalue iteration did not converge")]
    Eigen,

    #[error("{0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
