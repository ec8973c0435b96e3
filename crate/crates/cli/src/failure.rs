//! Errors mapped onto exit codes.

use std::fmt;
use std::io::ErrorKind;

use grafion_core::algorithms::AlgoError;
use grafion_core::io::IoError;
use grafion_core::layout::LayoutError;
use grafion_core::query::QueryError;

use crate::render;

#[derive(Debug)]
pub enum Failure {
    /// Bad input: exit code 1.
    User(String),
    /// Something failed that the user could not have prevented: exit code 2.
    Internal(String),
}

impl Failure {
    pub fn user(message: impl Into<String>) -> Failure {
        Failure::User(message.into())
    }

    pub fn internal(message: impl ToString) -> Failure {
        Failure::Internal(message.to_string())
    }

    /// A query error, with a caret under the offending position when the
    /// error has one.
    pub fn query(text: &str, e: QueryError) -> Failure {
        match e {
            QueryError::Io(io) => io.into(),
            e => Failure::User(render::query_error(text, &e)),
        }
    }

    pub fn code(&self) -> u8 {
        match self {
            Failure::User(_) => 1,
            Failure::Internal(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::User(m) => write!(f, "error: {m}"),
            Failure::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Io(ref io) if !matches!(io.kind(), ErrorKind::NotFound | ErrorKind::PermissionDenied) => {
                Failure::internal(e)
            }
            e => Failure::user(e.to_string()),
        }
    }
}

impl From<AlgoError> for Failure {
    fn from(e: AlgoError) -> Self {
        Failure::user(e.to_string())
    }
}

impl From<LayoutError> for Failure {
    fn from(e: LayoutError) -> Self {
        Failure::user(e.to_string())
    }
}
