use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot split interval {0}: endpoints are equal")]
    DegenerateSplit(String),
    #[error("cannot split interval {0}: endpoints must be finite")]
    InfiniteSplit(String),
    #[error("objective is undefined on an empty outcome set")]
    EmptyOutcomes,
    #[error("frontier is empty")]
    EmptyFrontier,
    #[error("dataset has no examples")]
    EmptyDataset,
    #[error("feature index {index} out of range for dimension {dim}")]
    FeatureOutOfRange { index: usize, dim: usize },
    #[error("program is not concrete: {0}")]
    NotConcrete(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("{path}:{line}: {message}")]
    Data {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("oracle would enumerate {count} candidates (limit {limit})")]
    OracleTooLarge { count: u128, limit: u64 },
    #[error("oracle space is empty")]
    EmptySpace,
    #[error("{undetermined} undetermined predictions exceed the enumeration limit of {limit}")]
    TooManyUndetermined { undetermined: usize, limit: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            column,
            message: message.into(),
        }
    }
}
