use std::fmt;

use lp_projection::Error;

/// Process exit codes.
pub const EXIT_OK: u8 = 0;
pub const EXIT_PROPERTY: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_PRECONDITION: u8 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Malformed flags, vectors, files or numeric parameters.
    Parse(String),
    /// Well-formed input that violates a mathematical precondition.
    Precondition(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Precondition(_) => EXIT_PRECONDITION,
        }
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        CliError::Parse(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        CliError::Precondition(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Precondition(m) => write!(f, "precondition violated: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::InvalidExponent(_)
            | Error::InvalidRadius(_)
            | Error::InvalidEntries(_)
            | Error::InvalidMeasureSpace(_)
            | Error::SpaceMismatch
            | Error::InvalidSchedule(_) => CliError::Parse(msg),
            Error::ZeroBase
            | Error::ZeroDirection
            | Error::NotTangent(_)
            | Error::OffBoundary { .. }
            | Error::NotInTarget
            | Error::UnsupportedTarget(_)
            | Error::NoSignChange { .. }
            | Error::NotConverged { .. }
            | Error::DimensionCap { .. }
            | Error::WitnessPrecondition(_) => CliError::Precondition(msg),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
