use thiserror::Error;

/// Domain errors shared by every module of the crate.
///
/// Each variant carries a human-readable detail string; [`Error::name`]
/// gives the stable identifier used in JSON error bodies and exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unreachable: {0}")]
    Unreachable(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("negative delay: {0}")]
    NegativeDelay(String),
    #[error("unknown model: {0}")]
    UnknownModel(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("unbounded: {0}")]
    Unbounded(String),
    #[error("quadrature unconverged: {0}")]
    QuadratureUnconverged(String),
    #[error("never decorrelates: {0}")]
    NeverDecorrelates(String),
    #[error("unknown format: {0}")]
    UnknownFormat(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::Unreachable(_) => "Unreachable",
            Error::NoSolution(_) => "NoSolution",
            Error::NegativeDelay(_) => "NegativeDelay",
            Error::UnknownModel(_) => "UnknownModel",
            Error::OutOfRange(_) => "OutOfRange",
            Error::Unbounded(_) => "Unbounded",
            Error::QuadratureUnconverged(_) => "QuadratureUnconverged",
            Error::NeverDecorrelates(_) => "NeverDecorrelates",
            Error::UnknownFormat(_) => "UnknownFormat",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    pub fn detail(&self) -> &str {
        match self {
            Error::Unreachable(d)
            | Error::NoSolution(d)
            | Error::NegativeDelay(d)
            | Error::UnknownModel(d)
            | Error::OutOfRange(d)
            | Error::Unbounded(d)
            | Error::QuadratureUnconverged(d)
            | Error::NeverDecorrelates(d)
            | Error::UnknownFormat(d)
            | Error::InvalidInput(d) => d,
        }
    }

    /// Prefixes the detail with the name of the pair or stage that failed.
    pub fn within(self, context: &str) -> Self {
        let wrap = |d: String| format!("{context}: {d}");
        match self {
            Error::Unreachable(d) => Error::Unreachable(wrap(d)),
            Error::NoSolution(d) => Error::NoSolution(wrap(d)),
            Error::NegativeDelay(d) => Error::NegativeDelay(wrap(d)),
            Error::UnknownModel(d) => Error::UnknownModel(wrap(d)),
            Error::OutOfRange(d) => Error::OutOfRange(wrap(d)),
            Error::Unbounded(d) => Error::Unbounded(wrap(d)),
            Error::QuadratureUnconverged(d) => Error::QuadratureUnconverged(wrap(d)),
            Error::NeverDecorrelates(d) => Error::NeverDecorrelates(wrap(d)),
            Error::UnknownFormat(d) => Error::UnknownFormat(wrap(d)),
            Error::InvalidInput(d) => Error::InvalidInput(wrap(d)),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
