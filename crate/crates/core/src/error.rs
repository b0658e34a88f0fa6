use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Verification of a tuned threshold missed its target even after the
    /// bisection fallback.
    #[error(
        "calibration failed: {reason} (target {target_t:.4} s, achieved {achieved_t:.4} s \
         at delta {delta:.4}, {samples_used} samples)"
    )]
    CalibrationFailed {
        reason: String,
        target_t: f64,
        achieved_t: f64,
        delta: f64,
        samples_used: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid_arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

pub(crate) fn check_len(what: &str, got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return invalid_arg(format!("{what}: length {got}, expected {expected}"));
    }
    Ok(())
}
