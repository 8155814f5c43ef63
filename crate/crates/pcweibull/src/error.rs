use thiserror::Error;

/// Errors surfaced by the numerical kernels, the model, and the fitting engines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no sign change on bracket [{lo}, {hi}]: f(lo)={f_lo}, f(hi)={f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("quadrature did not converge within {subdivisions} subdivisions (best estimate {estimate}, error {error})")]
    Accuracy {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("saturated: {0}")]
    Saturated(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("nonfinite value at {context}")]
    Numeric { context: String },

    #[error("not supported: {0}")]
    Capability(String),

    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("csv parse error at row {row}: {message}")]
    Csv { row: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
