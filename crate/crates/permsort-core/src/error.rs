use thiserror::Error;

/// Unified error type for the crate.
///
/// `Parse` covers malformed permutation or class-specification text,
/// `Domain` covers structurally invalid inputs (non-bijections, mismatched
/// sizes, degenerate point sets), `ResourceLimit` is returned when a request
/// exceeds a hard computational cap rather than silently degrading, and
/// `Verification` reports a certificate that fails its checks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed table file: {0}")]
    BadTable(String),
}

impl Error {
    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
