use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("{function}: argument {value} outside domain ({constraint})")]
    Domain {
        function: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// A power series did not reach its tolerance within the allowed terms.
    #[error("{function}: series did not converge within {terms} terms")]
    NonConvergence {
        function: &'static str,
        terms: usize,
    },

    /// A model parameter violates its invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
