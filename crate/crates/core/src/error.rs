use thiserror::Error;

/// Failures surfaced by the library.
///
/// Each variant maps onto one CLI exit code: bad input, a resource cap
/// refusal, or a structural invariant that should be impossible on valid
/// input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input at {locus}: {message}")]
    InvalidInput { locus: String, message: String },

    #[error("{what} needs {required}, which exceeds the cap of {cap} (raise it with {flag})")]
    CapExceeded {
        what: String,
        required: String,
        cap: String,
        flag: String,
    },

    #[error("invariant violated ({check}): {detail}")]
    Invariant { check: String, detail: String },
}

impl Error {
    pub fn invalid(locus: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidInput {
            locus: locus.into(),
            message: message.into(),
        }
    }

    pub fn cap(
        what: impl Into<String>,
        required: impl ToString,
        cap: impl ToString,
        flag: impl Into<String>,
    ) -> Self {
        Error::CapExceeded {
            what: what.into(),
            required: required.to_string(),
            cap: cap.to_string(),
            flag: flag.into(),
        }
    }

    pub fn invariant(check: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Invariant {
            check: check.into(),
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
