use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("input out of domain: {0}")]
    InputDomain(String),

    /// A configuration that cannot be run (bad noise parameters, overlapping buckets, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Malformed automaton or counter text.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A caller broke an operation's contract, e.g. handed the learner a
    /// word that is not a counterexample.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Writing experiment outputs failed.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::InputDomain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
