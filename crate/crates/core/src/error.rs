use thiserror::Error;

/// Failure modes shared by every module.
///
/// Each variant maps to a stable process exit code (see [`Error::code`]) so the
/// command-line front end can report failures without inspecting messages.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The input violates a precondition (non-divisor, singular curve, ...).
    #[error("{0}")]
    Invalid(String),
    /// A configured resource limit (element count, degree, prime size) was hit.
    #[error("{0}")]
    Budget(String),
    /// An internal consistency assertion did not hold.
    #[error("{0}")]
    Structural(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }

    pub fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub fn code(&self) -> i32 {
        match self {
            Error::Invalid(_) => 3,
            Error::Budget(_) => 4,
            Error::Structural(_) => 5,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Invalid(_) => "validation",
            Error::Budget(_) => "budget",
            Error::Structural(_) => "structural",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
