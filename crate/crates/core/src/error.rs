use thiserror::Error;

/// Errors raised by the chain, Riemann and analysis routines.
///
/// Numeric payloads are stored as `f64` regardless of the scalar type the
/// computation ran in, so the error type stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} is undefined at {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("strain {strain} is in the elliptic region (sigma' = {slope} < 0)")]
    Elliptic { strain: f64, slope: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("particles crossed at cell {cell}; state refused")]
    Crossed { cell: usize },

    #[error("no shock joins F_l = {left} and F = {right}: chord slope {slope} < 0")]
    NoShock { left: f64, right: f64, slope: f64 },

    #[error("inadmissible shock from F_l = {left} to F = {right}")]
    Inadmissible { left: f64, right: f64 },

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("wave structure not found: {message}")]
    Structure {
        message: String,
        /// (F̄, residual) pairs from the diagnostic sweep.
        sweep: Vec<(f64, f64)>,
    },

    #[error("t = {t} is beyond the validity horizon t0 = {horizon}")]
    Horizon { t: f64, horizon: f64 },

    #[error("integration aborted at t = {t}: {reason}")]
    IntegrationAborted {
        t: f64,
        reason: Box<Error>,
        /// Flattened (positions, velocities) at the last accepted step.
        state: Vec<f64>,
    },

    #[error("step size underflow at t = {t} (h = {step})")]
    StepUnderflow { t: f64, step: f64 },

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    #[error("diagnostic: {0}")]
    Diagnostic(String),

    #[error("configuration mismatch: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
