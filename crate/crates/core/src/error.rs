use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated an operation's precondition.
    #[error("usage error: {0}")]
    Usage(String),

    /// An iterative method did not converge, or a computed quantity failed
    /// an internal consistency check.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A mathematical domain violation, e.g. the log of a non-positive matrix.
    #[error("domain error: {0}")]
    Domain(String),

    /// Not enough usable points for a fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Prefixes the message with the job context that produced it.
    pub fn context(self, ctx: impl std::fmt::Display) -> Error {
        match self {
            Error::Usage(m) => Error::Usage(format!("{ctx}: {m}")),
            Error::Numerical(m) => Error::Numerical(format!("{ctx}: {m}")),
            Error::Domain(m) => Error::Domain(format!("{ctx}: {m}")),
            Error::InsufficientData(m) => Error::InsufficientData(format!("{ctx}: {m}")),
            Error::Parse(m) => Error::Parse(format!("{ctx}: {m}")),
            Error::Io(e) => Error::Io(std::io::Error::new(e.kind(), format!("{ctx}: {e}"))),
        }
    }
}
