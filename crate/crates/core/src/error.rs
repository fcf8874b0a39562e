use thiserror::Error;

/// Errors raised by the pancake graph library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PancakeError {
    #[error("{what} = {value} is out of range [{min}, {max}]")]
    Range {
        what: &'static str,
        value: u64,
        min: u64,
        max: u64,
    },
    #[error("vertex {0} is not a vertex of this view")]
    Membership(String),
    #[error("{0} is outside the domain of this map")]
    Domain(String),
    #[error("n = {n} exceeds the enumeration bound {limit} for {context}")]
    Capacity {
        n: usize,
        limit: usize,
        context: &'static str,
    },
    #[error("dominating set id needs distinct first and last element, got i = j = {0}")]
    IdentityConflict(u8),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("graph too large: {vertices} vertices, limit {limit}")]
    Size { vertices: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, PancakeError>;
