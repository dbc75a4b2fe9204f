use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole: lambda = {lambda} lies within {tol:e} of shell n = {shell}")]
    Pole { lambda: f64, shell: u64, tol: f64 },

    #[error("empty annulus: no shell n in N3 with |n - {lambda}| < {width}")]
    EmptyAnnulus { lambda: f64, width: f64 },

    #[error("memory budget exceeded: {what} needs {required} bytes, budget is {budget} bytes")]
    MemoryBudget {
        what: String,
        required: u64,
        budget: u64,
    },

    #[error("solver failed on ({lo}, {hi}): {reason}")]
    Solver { lo: f64, hi: f64, reason: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
