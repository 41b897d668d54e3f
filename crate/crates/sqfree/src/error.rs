use std::fmt;

/// Error type shared by all modules.
///
/// `Domain` is a caller mistake (bad argument), `Range` an arithmetic overflow
/// or unsupported width, `Budget` a refusal to start work that exceeds the
/// configured limits, and `Consistency` an internal cross-check that failed
/// (these indicate a bug or broken invariant and are never silently ignored).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    Domain(String),
    Range(String),
    Budget(String),
    Consistency(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Range(m) => write!(f, "range error: {m}"),
            Error::Budget(m) => write!(f, "budget exceeded: {m}"),
            Error::Consistency(m) => write!(f, "consistency failure: {m}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn range<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Range(msg.into()))
}

pub(crate) fn budget<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Budget(msg.into()))
}

pub(crate) fn consistency<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Consistency(msg.into()))
}
