use std::fmt;

use logcone::Error;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NOT_POSITIVE: i32 = 3;
pub const EXIT_DEGENERATE_REGRESSION: i32 = 4;
pub const EXIT_SINGULAR: i32 = 5;
pub const EXIT_DEPENDENT: i32 = 6;
pub const EXIT_NOT_ADAPTED: i32 = 7;
pub const EXIT_DOOB: i32 = 8;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        Self { code: EXIT_PARSE, message: message.into() }
    }

    pub fn not_positive(message: impl Into<String>) -> Self {
        Self { code: EXIT_NOT_POSITIVE, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotPositive { .. } => EXIT_NOT_POSITIVE,
        Error::DegenerateRegressor { .. } => EXIT_DEGENERATE_REGRESSION,
        Error::SingularCovariance { .. } => EXIT_SINGULAR,
        Error::DependentConstraints => EXIT_DEPENDENT,
        Error::NotAdapted { .. } => EXIT_NOT_ADAPTED,
        Error::NotSubmartingale { .. } => EXIT_DOOB,
        _ => EXIT_PARSE,
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        Self { code: exit_code(&err), message: err.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        Self::parse(err.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
