use std::fmt;

use cascade_core::ErrorKind;

/// A failed run: what went wrong and which exit status to report.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub kind: ErrorKind,
    pub message: String,
}

impl Failure {
    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Validation,
            message: message.into(),
        }
    }

    pub fn physicality(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Physicality,
            message: message.into(),
        }
    }

    /// Wrap a library error, prefixing where it happened.
    pub fn from_core(context: &str, err: cascade_core::Error) -> Self {
        Self {
            kind: err.kind(),
            message: format!("{context}: {err}"),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Validation => 2,
            ErrorKind::Physicality => 3,
            ErrorKind::Resource => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

pub type Outcome<T = ()> = Result<T, Failure>;

/// Attach context to library results.
pub trait Context<T> {
    fn context(self, what: &str) -> Outcome<T>;
}

impl<T> Context<T> for cascade_core::Result<T> {
    fn context(self, what: &str) -> Outcome<T> {
        self.map_err(|e| Failure::from_core(what, e))
    }
}
