use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the solvers and the scan layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point r = {r} lies outside the open domain {domain}")]
    Domain { r: String, domain: String },

    #[error("no sign change of the termination function in [{lo}, {hi}] after {iterations} iterations")]
    NoRootFound { lo: String, hi: String, iterations: usize },

    #[error("roots did not stabilize within {iterations} iterations (last change {last_change}); raise mantissa bits or max iterations")]
    PrecisionExhausted { iterations: usize, last_change: String },

    #[error("coefficient overflow at iteration {iteration}; raise mantissa bits")]
    Overflow { iteration: usize },

    #[error("no admissible solution: {0}")]
    NoSolution(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("grid extrapolation did not converge: {0}")]
    NotConverged(String),

    #[error("no sign change over the window: {0}")]
    NoSignChange(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Serialize { path: PathBuf, message: String },
}

impl Error {
    /// Short machine-readable name, printed by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::Domain { .. } => "DomainError",
            Error::NoRootFound { .. } => "NoRootFound",
            Error::PrecisionExhausted { .. } => "PrecisionExhausted",
            Error::Overflow { .. } => "Overflow",
            Error::NoSolution(_) => "NoSolution",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::NotConverged(_) => "NotConverged",
            Error::NoSignChange(_) => "NoSignChange",
            Error::Io { .. } => "IoError",
            Error::Serialize { .. } => "SerializeError",
        }
    }

    /// Whether the error means a solver ran but failed to converge, as
    /// opposed to bad input or I/O.
    pub fn is_convergence_failure(&self) -> bool {
        matches!(
            self,
            Error::NoRootFound { .. }
                | Error::PrecisionExhausted { .. }
                | Error::Overflow { .. }
                | Error::NotConverged(_)
                | Error::NoSignChange(_)
                | Error::NoSolution(_)
        )
    }

    pub fn hint(&self) -> Option<&'static str> {
        match self {
            Error::NoRootFound { .. } => Some("widen the search window or raise --max-iter"),
            Error::PrecisionExhausted { .. } | Error::Overflow { .. } => {
                Some("raise --precision-bits or --max-iter")
            }
            Error::NotConverged(_) => Some("the grid oracle could not reach 1e-8; try the aim solver"),
            Error::NoSignChange(_) => Some("widen the parameter window"),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
