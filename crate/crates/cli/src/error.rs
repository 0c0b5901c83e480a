use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use optomech_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    Usage(String),
    Config(CoreError),
    Numerical(CoreError),
    Verification(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Io { .. } => 1,
            CliError::Usage(_) => 2,
            CliError::Config(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Verification(_) => 5,
        })
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Config { .. }
            | CoreError::ConfigKey { .. }
            | CoreError::InvalidParameter { .. } => CliError::Config(e),
            CoreError::DegenerateFrequency { .. } | CoreError::Grid(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Numerical(e),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Config(e) => write!(f, "config: {e}"),
            CliError::Numerical(e) => write!(f, "numerical: {e}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
