use thiserror::Error;

/// Errors shared by every layer of the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A value outside an operation's domain (zero where nonzero is required,
    /// mismatched field/ring parameters, wrong table arity, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A construction hypothesis failed; the message names the condition.
    #[error("construction hypothesis violated: {0}")]
    Construction(String),

    /// An exhaustive enumeration would exceed the caller's budget.
    #[error("enumeration budget exceeded: {required} cases required, budget is {budget}")]
    Budget { required: u128, budget: u128 },

    /// A table of Walsh values is not the spectrum of any function.
    #[error("not a valid spectrum: {0}")]
    InvalidSpectrum(String),

    /// An operation that requires a generalized bent input got a non-bent one.
    #[error("input is not generalized bent ({failures} failing points)")]
    NotGbent { failures: usize },

    /// A check whose preconditions do not hold for the given function.
    #[error("check not applicable: {0}")]
    Inapplicable(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
