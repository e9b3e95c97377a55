use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum GkError {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A result cannot be represented (overflow, unsupported order, ...).
    #[error("range error: {0}")]
    Range(String),

    /// The enumeration budget ran out before the stopping rule was met.
    #[error(
        "budget of {budget} eigenvalues exhausted (mass reached {mass_reached:.17e}, \
         last ln lambda {last_log_lambda:.17e}); raise --budget or GK_BUDGET"
    )]
    Budget {
        budget: u64,
        mass_reached: f64,
        last_log_lambda: f64,
    },

    #[error("requested n = {requested} exceeds the budget of {budget}; raise --budget or GK_BUDGET")]
    BudgetRequest { requested: u64, budget: u64 },

    /// The enumeration frontier grew past its memory cap.
    #[error("frontier exceeded {cap} entries; raise --frontier-cap")]
    FrontierCap { cap: usize },

    /// The request needs more accuracy than the tail computation can give.
    #[error("precision error: {0}")]
    Precision(String),

    #[error("cannot parse {what} `{input}`: {msg}")]
    Parse {
        what: &'static str,
        input: String,
        msg: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl GkError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        GkError::Domain(msg.into())
    }

    pub(crate) fn parse(what: &'static str, input: &str, msg: impl Into<String>) -> Self {
        GkError::Parse {
            what,
            input: input.to_string(),
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GkError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, GkError>;
