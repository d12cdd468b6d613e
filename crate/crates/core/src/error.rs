use thiserror::Error;

use crate::lie::OrbitReport;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument error: {0}")]
    Argument(String),

    /// A matrix that should lie in the image of the representation does not.
    #[error("representation closure error: {0}")]
    RepresentationClosure(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("integration failed at t = {last_time}: {reason}")]
    Integration { last_time: f64, reason: String },

    /// Case-(b) machinery was called with a covector outside the generic set.
    #[error("covector is not in the generic set: {message}")]
    GenericSet {
        message: String,
        report: Box<OrbitReport>,
    },

    #[error("unknown {kind} `{name}`; available: {available}")]
    Catalog {
        kind: String,
        name: String,
        available: String,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
