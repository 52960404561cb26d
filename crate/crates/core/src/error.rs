use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// `φ⁻¹(p)` requested for a value `φ` never reaches on its domain.
    #[error("value {value} is not attained: sup of phi on [0, {lambda0}) is {sup}")]
    Unreachable { value: f64, lambda0: f64, sup: f64 },

    #[error("sample is not centered: |mean| = {mean_abs:e} exceeds {limit:e}")]
    NotCentered { mean_abs: f64, limit: f64 },

    #[error("sample has {size} values, at least {required} are required")]
    SampleTooSmall { size: usize, required: usize },

    #[error("sigma vanishes at n = {n} (degenerate prefix of the model)")]
    DegenerateSigma { n: u64 },

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("every candidate partition gives a divergent block sum")]
    AllDivergent,

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
