use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The data carry no information about the quantity requested,
    /// e.g. a sample whose reported degrees sum to zero.
    #[error("degenerate sample: {0}")]
    Degenerate(String),

    /// The operation is not defined for the requested model or method.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The caller omitted an input the operation needs.
    #[error("usage error: {0}")]
    Usage(String),

    /// The computation is out of reach at this size (ERGM above 1000 nodes).
    #[error("infeasible: {0}")]
    Infeasible(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

/// Returns a domain error unless `cond` holds.
pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}
