use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An assignment that reads and writes shared variables, given to a
    /// model that needs to tell stores from loads.
    #[error("action `{0}` both reads and writes shared variables")]
    UnsupportedMixedAccess(String),

    #[error("unsupported instruction `{action}`: {reason}")]
    UnsupportedInstruction { action: String, reason: String },

    #[error("exploration exceeded the cap of {cap} configurations")]
    NonTerminatingExploration { cap: usize },

    #[error("{line}:{column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },

    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),

    #[error("annotations cannot be nested")]
    NestedAnnotation,

    #[error("backend {backend} cannot run model {model}")]
    IncompatibleBackend { backend: String, model: String },

    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

impl Error {
    pub fn parse(line: usize, column: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            msg: msg.into(),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, err: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            msg: err.to_string(),
        }
    }
}
