use std::path::PathBuf;

use landau_core::LandauError;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("sweep point {point}: {source}")]
    Point {
        point: String,
        #[source]
        source: LandauError,
    },
    #[error(transparent)]
    Core(#[from] LandauError),
    #[error("bad snapshot {path}: {message}")]
    Snapshot { path: PathBuf, message: String },
    #[error("nothing to report")]
    EmptyResults,
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> LabError {
    let path = path.into();
    move |source| LabError::Io { path, source }
}
