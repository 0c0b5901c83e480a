use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("config key `{key}`: {message}")]
    ConfigKey { key: String, message: String },

    #[error("frequency {omega} rad/s is degenerate: var_v and the commutator density both vanish at omega = 0")]
    DegenerateFrequency { omega: f64 },

    #[error("linear system is singular at omega = {omega} rad/s")]
    Singular { omega: f64 },

    #[error("{what}: no admissible root in bracket [{lo}, {hi}]")]
    Convergence { what: String, lo: f64, hi: f64 },

    #[error("min E - 1 does not change sign for T in [{lo} K, {hi} K]")]
    NoCrossing { lo: f64, hi: f64 },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("table line {line}: {message}")]
    Table { line: usize, message: String },
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }
}
