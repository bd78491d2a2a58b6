use std::fmt;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_USAGE: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    /// Bad input data or a failed numerical precondition.
    Validation(String),
    Budget(String),
    /// Arguments that parse but do not make sense together.
    Usage(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::Usage(_) => EXIT_USAGE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Budget(m) | CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl From<privstate_core::Error> for CliError {
    fn from(e: privstate_core::Error) -> Self {
        match e {
            privstate_core::Error::Budget { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Validation(format!("json: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Validation(format!("csv: {e}"))
    }
}

/// Fails with [`CliError::Budget`] when `needed` exceeds `limit`.
pub fn check_budget(needed: usize, limit: usize) -> Result<(), CliError> {
    if needed > limit {
        return Err(privstate_core::Error::Budget { needed: needed as u128, limit: limit as u128 }.into());
    }
    Ok(())
}
