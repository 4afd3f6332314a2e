use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The explicit admissibility bound requires `b0 + rho * sigma0 > 0`.
    #[error("admissibility bound inapplicable: b0 + rho*sigma0 = {value} <= 0")]
    AdmissibilityBoundInapplicable { value: f64 },

    #[error("retention level {0} outside [0, 1]")]
    RetentionOutOfRange(f64),

    #[error("no real stationary root for the variance equation")]
    NoStationaryRoot,

    #[error("time {t} outside the horizon [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
