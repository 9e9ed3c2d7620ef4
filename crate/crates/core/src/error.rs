use std::fmt;

use thiserror::Error;

use crate::link_model::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("scenario failed validation: {}", ViolationList(.0))]
    Validation(Vec<Violation>),

    /// The closed form diverges as the effective dispersion goes to zero.
    #[error(
        "effective dispersion {beta2:e} s^2/m below closed-form threshold (span {span}, channel {channel})"
    )]
    ZeroDispersion {
        span: usize,
        channel: usize,
        beta2: f64,
    },

    #[error("correction factor domain error in {term}: {detail}")]
    CorrectionDomain { term: &'static str, detail: String },

    #[error("quadrature did not converge (last estimates {previous:e} and {last:e})")]
    Convergence { previous: f64, last: f64 },

    #[error("scenario generation failed for index {index}: {reason}")]
    Generation { index: usize, reason: String },

    #[error("amplifier gain {gain} below unity (span {span}, channel {channel})")]
    GainBelowUnity {
        span: usize,
        channel: usize,
        gain: f64,
    },

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

struct ViolationList<'a>(&'a [Violation]);

impl fmt::Display for ViolationList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
