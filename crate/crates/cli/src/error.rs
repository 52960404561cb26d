use std::fmt;

/// Process exit codes.
pub mod code {
    pub const IO: i32 = 1;
    pub const DOMAIN: i32 = 2;
    pub const NONCONVERGENCE: i32 = 3;
    pub const DIVERGENT: i32 = 4;
    pub const DOMINANCE: i32 = 5;
    pub const CENSORED: i32 = 6;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        Self::new(code::DOMAIN, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<lilbound::Error> for CliError {
    fn from(e: lilbound::Error) -> Self {
        use lilbound::Error as E;
        let code = match &e {
            E::NonConvergence { .. } => code::NONCONVERGENCE,
            E::AllDivergent => code::DIVERGENT,
            E::Calibration(_) => code::DOMINANCE,
            _ => code::DOMAIN,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(code::IO, format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::new(code::IO, format!("csv error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::new(code::DOMAIN, format!("json error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
