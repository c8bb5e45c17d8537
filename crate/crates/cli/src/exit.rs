use sflab_core::report::Status;
use sflab_core::Error;

pub const PASS: u8 = 0;
pub const FAIL: u8 = 1;
pub const USAGE: u8 = 2;
pub const CAPACITY: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: USAGE,
            message: message.into(),
        }
    }

    pub fn check(message: impl Into<String>) -> Self {
        Failure {
            code: FAIL,
            message: message.into(),
        }
    }
}

pub fn code_for(err: &Error) -> u8 {
    match err {
        Error::CapacityExceeded { .. } | Error::NonConvergence(_) | Error::NonFinite => CAPACITY,
        Error::Spec(s) if s.is_capacity() => CAPACITY,
        Error::Spec(s) if !s.violations().is_empty() => FAIL,
        Error::StructureMismatch { .. } => FAIL,
        _ => USAGE,
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure {
            code: code_for(&err),
            message: err.to_string(),
        }
    }
}

/// Inconclusive checks do not fail a run.
pub fn code_for_status(status: Status) -> u8 {
    match status {
        Status::Fail => FAIL,
        Status::Pass | Status::Inconclusive => PASS,
    }
}
