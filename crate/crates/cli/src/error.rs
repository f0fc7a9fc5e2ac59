use thiserror::Error;

use crate::expr::ParseError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] friedrichs_core::Error),
    #[error("reading {path}: {source}")]
    ConfigFile { path: String, source: std::io::Error },
    #[error("config file {path} is not valid: {source}")]
    ConfigJson { path: String, source: serde_json::Error },
    #[error("writing output: {0}")]
    Output(String),
}

impl CliError {
    /// 2 for anything the user can fix in the input, 3 when a numerical
    /// procedure failed, 1 when the report could not be written.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Output(_) => 1,
            _ => 2,
        }
    }
}
