use alloc::string::String;

/// Errors raised by evaluators and enumerators.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the region where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A denominator vanished; `factor` names the offending expression.
    #[error("pole: {factor} vanishes")]
    Pole { factor: String },
    /// A computation produced a non-finite value or was too ill-conditioned.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// A value was computed, but its terms cancel by more than
    /// [`crate::scalar::RESOLVABLE_CONDITION`]; sampling checks redraw.
    #[error("unresolved: terms cancel by a factor {condition:e}")]
    Unresolved { condition: f64 },
    /// The requested size exceeds the configured cap.
    #[error("resource limit: n = {n} exceeds cap {cap}")]
    Resource { n: usize, cap: usize },
    /// Input data violates a structural invariant.
    #[error("validation error: {0}")]
    Validation(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn pole(factor: impl Into<String>) -> Self {
        Error::Pole {
            factor: factor.into(),
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
