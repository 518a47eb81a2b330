use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A request would exceed a configured memory or size budget.
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("{0} is not squarefree")]
    NotSquarefree(u64),
    #[error("{value} is outside the supported range (limit {limit})")]
    OutOfRange { value: u64, limit: u64 },
    /// Input violates an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("search failed: {0}")]
    Search(String),
    #[error("numeric error: {0}")]
    Numeric(String),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
