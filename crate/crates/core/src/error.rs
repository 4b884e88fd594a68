use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    /// A constructed object failed one of its structural checks.
    #[error("internal consistency error: {0}")]
    Consistency(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("model format error: {0}")]
    Format(String),
    #[error("training error: {0}")]
    Training(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Consistency(_) | Error::Invariant(_) | Error::Training(_) => 1,
            Error::Usage(_) | Error::Config(_) | Error::Capacity(_) | Error::Format(_) => 2,
            Error::Io(_) => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
