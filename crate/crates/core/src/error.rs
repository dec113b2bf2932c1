use std::path::PathBuf;

use thiserror::Error;

use crate::io::config::ConfigIssue;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric parameter is outside the range its model accepts.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// Structurally invalid or inconsistent input data.
    #[error("invalid input: {0}")]
    Input(String),

    /// A density or function was evaluated outside its support.
    #[error("outside domain: {0}")]
    Domain(String),

    #[error("degenerate normalization: n_total == n_avg ({0})")]
    DegenerateNormalization(f64),

    #[error("distribution does not reach probability {0} on its numeric support")]
    UnboundedQuantile(f64),

    #[error("configuration rejected:\n{}", format_issues(.0))]
    Config(Vec<ConfigIssue>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

fn format_issues(issues: &[ConfigIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("  - {i}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Format {
            path: path.into(),
            message: message.to_string(),
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        match self {
            Error::Stage { .. } => self,
            other => Error::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }

    /// True for errors caused by bad configuration or input data rather than
    /// by a failure during computation.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Parameter { .. } | Error::Config(_) | Error::Input(_) | Error::Format { .. } => {
                true
            }
            Error::Io { source, .. } => source.kind() == std::io::ErrorKind::NotFound,
            Error::Stage { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and > 0, got {value}")))
    }
}

pub(crate) fn ensure_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and >= 0, got {value}")))
    }
}
