use std::fmt;

/// Failure classes, each with its own process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn io(path: impl fmt::Display, e: impl fmt::Display) -> Self {
        CliError::Io(format!("{path}: {e}"))
    }
}

impl From<emdecay::Error> for CliError {
    fn from(e: emdecay::Error) -> Self {
        use emdecay::Error as E;
        match e {
            E::Domain { .. }
            | E::InvalidParameter { .. }
            | E::Mesh(_)
            | E::MeshParse { .. }
            | E::UnknownMode(_)
            | E::NonTangential { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
