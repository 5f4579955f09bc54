use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] evlab_core::Error),
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("range error at `{field}`: {message}")]
    Range { field: String, message: String },
    #[error("every realization failed ({escapes} escapes); first failure: {first}")]
    AllRealizationsFailed { escapes: usize, first: String },
    #[error("unknown figure `{0}` (expected one of rot, ber, ei, PM, lor, cat, henon)")]
    UnknownFigure(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    pub fn range(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Range { field: field.into(), message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
