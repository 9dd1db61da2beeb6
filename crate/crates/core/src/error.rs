use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A constructor or operation received a parameter outside its domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A step index outside the schedule's range.
    #[error("index {index} outside the schedule range 0..={max}")]
    Index { index: usize, max: usize },

    /// A theorem hypothesis does not hold for the given inputs.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Argument outside a function's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The quantity is undefined at this point (e.g. a ratio at a minimizer).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The requested operation needs data or structure that is not available.
    #[error("capability missing: {0}")]
    Capability(String),

    /// A run produced a non-finite or overflowing value or gradient.
    #[error("divergence at iteration {iteration}: {detail}")]
    Divergence { iteration: usize, detail: String },

    /// Malformed or inconsistent configuration; `line` and `column` are 1-based.
    #[error("config error at line {line}, column {column}: {message}")]
    Config {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),

    /// One or more ensemble members diverged.
    #[error("ensemble diverged for seeds {seeds:?}")]
    EnsembleDiverged { seeds: Vec<u64> },
}
