//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by validation of inputs across all modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid topology: {0}")]
    Topology(String),

    #[error("invalid parameter `{name}`: {reason}")]
    Param { name: &'static str, reason: String },

    #[error("identity {identity} outside its domain: {reason}")]
    IdentityDomain { identity: &'static str, reason: String },

    #[error("{result} is not defined here: {reason}")]
    OutOfDomain { result: &'static str, reason: String },

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("region error: {0}")]
    Region(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Param {
        name,
        reason: reason.into(),
    }
}
