use alloc::string::String;

use crate::hamiltonian::Scheme;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("{operation} is not defined for scheme {scheme}")]
    SchemeMismatch { scheme: Scheme, operation: &'static str },

    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),

    #[error("unknown observable `{0}`")]
    UnknownObservable(String),

    #[error("unknown constraint line `{0}`")]
    UnknownConstraint(String),

    #[error("unknown sweep parameter `{0}`")]
    UnknownSweepParam(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("step size underflow at t = {t} (h = {step:e}); stiff segment")]
    StepUnderflow { t: f64, step: f64 },

    #[error("integration exceeded {steps} steps at t = {t}")]
    TooManySteps { t: f64, steps: usize },

    #[error("norm drift {drift:e} at t = {t} exceeds 1e-6")]
    NormDrift { t: f64, drift: f64 },

    #[error("trajectory is empty")]
    EmptyTrajectory,

    #[error("eigenvector continuity lost for state {state} at t = {t} (overlap {overlap:.3})")]
    ContinuityFailure { t: f64, state: usize, overlap: f64 },

    #[error("effective Stokes phase is indeterminate at t = {t} (amplitude below 1e-12)")]
    IndeterminatePhase { t: f64 },

    #[error("time grid must increase monotonically (t = {t} after {previous})")]
    NonMonotoneTime { t: f64, previous: f64 },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
