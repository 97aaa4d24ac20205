use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("cannot scale noise to a finite SNR: the noiseless signal A·x is zero")]
    ZeroSignal,

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("Big-M calibration did not reach a strictly interior solution after {iterations} rounds (last M = {last_m}, ‖x‖∞ = {last_norm})")]
    CalibrationFailed {
        iterations: usize,
        last_m: f64,
        last_norm: f64,
    },

    #[error("cannot branch: node has no free coordinate")]
    NothingToBranch,

    #[error("enumeration budget exceeded: {count} supports > {budget}")]
    BudgetExceeded { count: u128, budget: u128 },

    #[error("unknown sweep variable `{0}` (expected gamma, sigma, rho or k)")]
    UnknownSweepVariable(String),

    #[error("safety violation in trial seed {seed}: {message}")]
    SafetyViolation { seed: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
