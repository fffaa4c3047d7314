use thiserror::Error;

/// Errors produced by the walking library.
///
/// `Config` and `Internal` carry enough context for a CLI to print
/// field-level diagnostics; the rest are contract violations at call sites.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A function argument violated its precondition (non-finite value,
    /// negative duration, bad substep, ...).
    #[error("invalid argument to {op}: {message}")]
    InvalidArgument { op: &'static str, message: String },

    /// A within-step time fell outside the step window [0, T].
    #[error("time {t} s is outside the step window [0, {step_duration}] s")]
    OutOfWindow { t: f64, step_duration: f64 },

    /// Impact was requested away from the step end.
    #[error("impact requires the state to be at the step end t = {expected} s, got t = {actual} s")]
    NotAtStepEnd { actual: f64, expected: f64 },

    /// A configuration value violated a semantic invariant.
    #[error("invalid configuration: {field}: {message}")]
    Config { field: String, message: String },

    /// The simulator produced an inconsistent state. Should be unreachable
    /// for validated configurations.
    #[error("internal consistency failure at step {step}: {message}")]
    Internal { step: usize, message: String },
}

impl Error {
    pub(crate) fn invalid(op: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidArgument {
            op,
            message: message.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
