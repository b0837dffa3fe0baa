use std::io;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Core(#[from] spanner_core::Error),
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("unknown distribution `{0}`")]
    UnknownDistribution(String),
    #[error("no NODE_COORD_SECTION found")]
    MissingCoordSection,
    #[error("unsupported EDGE_WEIGHT_TYPE `{0}`, only EUC_2D is accepted")]
    UnsupportedWeightType(String),
    #[error("DIMENSION is {declared} but {found} coordinates were read")]
    DimensionMismatch { declared: usize, found: usize },
    #[error("bench config: {0}")]
    Config(String),
    #[error("{algo} on {instance}: output failed verification ({verdict})")]
    Verification { algo: String, instance: String, verdict: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse { line, msg: msg.into() }
}
