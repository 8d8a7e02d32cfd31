use alloc::string::String;

use crate::models::ViolationReport;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    /// An argument lies outside the mathematical domain of a formula.
    #[error("{name} = {value} is outside the model domain (requires {requirement})")]
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// Geometry outside the 3GPP applicability ranges, evaluated without `force`.
    #[error("outside 3GPP RMa applicability ranges: {0}")]
    OutOfRange(ViolationReport),

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("singular design: {0}")]
    Singular(&'static str),

    #[error("empty input")]
    Empty,

    #[error("environment mismatch: expected {expected}, found {found}")]
    EnvironmentMismatch {
        expected: crate::models::Environment,
        found: crate::models::Environment,
    },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, requirement: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            requirement,
        }
    }
}

/// Fails with a domain error unless `value` is finite and strictly positive.
pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(name, value, "a finite value > 0"))
    }
}

/// Close-in models are only defined from the 1 m reference distance outward.
pub(crate) fn ensure_close_in_distance(d: f64) -> Result<()> {
    if d.is_finite() && d >= 1.0 {
        Ok(())
    } else {
        Err(Error::domain("d", d, "d >= 1 m"))
    }
}
