use std::fmt;

use hplus_core::error::Error as CoreError;

/// Process exit codes, shared by every command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitKind {
    /// Malformed or invalid input.
    Input = 2,
    /// Input is well formed but does not satisfy a command's precondition.
    Precondition = 3,
    /// A guarantee the library should provide did not hold.
    Internal = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            kind: ExitKind::Input,
            message: message.into(),
        }
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        Self {
            kind: ExitKind::Precondition,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self {
            kind: ExitKind::Internal,
            message: message.into(),
        }
    }

    pub fn code(&self) -> i32 {
        self.kind as i32
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let kind = match e {
            CoreError::OutsideDisc { .. }
            | CoreError::BadCoordinates { .. }
            | CoreError::InvalidArc(_)
            | CoreError::DuplicatePoint { .. }
            | CoreError::EmptySequence
            | CoreError::LengthMismatch { .. }
            | CoreError::InvalidParameter { .. } => ExitKind::Input,
            CoreError::DensityViolated { .. }
            | CoreError::TooManyNodes { .. }
            | CoreError::GammaResolution { .. }
            | CoreError::ShiftPastOrigin { .. } => ExitKind::Precondition,
            CoreError::EstimateViolated { .. } | CoreError::Lp(_) => ExitKind::Internal,
        };
        Self {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::input(format!("i/o: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
