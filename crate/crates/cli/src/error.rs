use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or flags; the message starts with the field path.
    #[error("usage error: {0}")]
    Usage(String),

    /// A numerical failure, tagged with the job that raised it.
    #[error("{context}: {source}")]
    Job {
        context: String,
        #[source]
        source: meanforce::Error,
    },

    #[error(transparent)]
    Core(#[from] meanforce::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn job(context: impl Into<String>) -> impl FnOnce(meanforce::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Job { context, source }
    }

    /// Exit status: 2 for usage errors, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Core(meanforce::Error::Usage(_)) => 2,
            _ => 1,
        }
    }
}
