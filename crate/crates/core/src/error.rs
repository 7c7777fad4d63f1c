use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative routine failed to converge.
    #[error("numeric error: {what} did not converge after {iterations} iterations (last estimate {estimate}, residual {residual:e})")]
    Convergence {
        what: &'static str,
        iterations: usize,
        estimate: f64,
        residual: f64,
    },

    /// Zero residual degrees of freedom (n ≤ j).
    #[error("degenerate design: n = {n} must exceed the number of columns j = {j}")]
    DegenerateDesign { n: usize, j: usize },

    #[error("singular design: {0}")]
    SingularDesign(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("degenerate anchor: {0}")]
    DegenerateAnchor(String),

    /// The adaptive quantile g + log b + C is not positive.
    #[error("nonpositive bracket: g ({g}) + log b ({log_b}) + C ({c_prior}) = {sum} <= 0")]
    NonpositiveBracket {
        g: f64,
        log_b: f64,
        c_prior: f64,
        sum: f64,
    },

    #[error("missing input: {0}")]
    MissingInput(String),

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("unknown column '{0}'")]
    MissingColumn(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Stable machine-readable identifier, used by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain_error",
            Error::Convergence { .. } => "numeric_error",
            Error::DegenerateDesign { .. } => "degenerate_design",
            Error::SingularDesign(_) => "singular_design",
            Error::DegenerateData(_) => "degenerate_data",
            Error::NoSolution(_) => "no_solution",
            Error::DegenerateAnchor(_) => "degenerate_anchor",
            Error::NonpositiveBracket { .. } => "nonpositive_bracket",
            Error::MissingInput(_) => "missing_input",
            Error::Parse { .. } => "parse_error",
            Error::MissingColumn(_) => "missing_column",
            Error::Io { .. } => "io_error",
        }
    }
}
