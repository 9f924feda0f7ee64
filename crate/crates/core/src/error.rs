use thiserror::Error;

/// Errors raised by the library. Each variant corresponds to one failure class
/// so that callers (and the CLI exit-code mapping) can match on it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("empty instance family: d*n = {dn} is not divisible by k = {k}")]
    EmptyFamily { dn: u64, k: u64 },
    #[error("no simple configuration found after {attempts} attempts")]
    RetryLimit { attempts: u32 },
    #[error("n = {n} exceeds the enumeration cap of {cap}; use the Monte Carlo estimators instead")]
    Capacity { n: usize, cap: usize },
    #[error("parse error at {position}: {message}")]
    Parse { position: String, message: String },
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("non-finite function value {value} at x = {x}")]
    Evaluation { x: f64, value: f64 },
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracketing { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("ratio is undefined at the reference point")]
    UndefinedRatio,
    #[error("series diverges: {0}")]
    SeriesDivergence(String),
    #[error("singular parameter: {0}")]
    SingularParameter(String),
    #[error("certificate check `{check}` failed at w1 = {witness}: {detail}")]
    CertificateFailure {
        check: String,
        witness: f64,
        detail: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
