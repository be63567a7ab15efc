use doa_core::{DoaError, ErrorClass};

/// Exit codes: 0 success, 1 usage, 2 assumption violation, 3 numerical
/// failure.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: u8,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 1,
        }
    }

    pub fn io(message: impl std::fmt::Display) -> Self {
        Self {
            message: message.to_string(),
            code: 1,
        }
    }
}

impl From<DoaError> for CliError {
    fn from(err: DoaError) -> Self {
        let code = match err.class() {
            ErrorClass::Usage => 1,
            ErrorClass::Assumption => 2,
            ErrorClass::Numerical => 3,
        };
        Self {
            message: err.to_string(),
            code,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}
