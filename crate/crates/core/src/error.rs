use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("weight {n} exceeds the enumeration cap {cap}")]
    Size { n: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported model: {0}")]
    Unsupported(String),

    #[error("exact input required: {0}")]
    Inexact(String),

    #[error("sample point {0} coincides with an interval endpoint")]
    EndpointCollision(f64),

    #[error("subordinator simulation stopped after {events} events with {uncovered} uncovered points (residual {residual:e})")]
    Truncation {
        events: usize,
        uncovered: usize,
        residual: f64,
    },

    #[error("root finding did not converge: {0}")]
    NoConvergence(String),

    #[error("parse error: {0}")]
    Parse(String),
}
