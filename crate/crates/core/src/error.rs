use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },

    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),

    #[error("non-positive price {price} on {date}")]
    NonPositivePrice { date: NaiveDate, price: f64 },

    #[error("series too short: need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("insufficient overlap: {common} common dates, need at least {required}")]
    InsufficientOverlap { common: usize, required: usize },

    #[error("singular design matrix (column {column} is collinear with earlier columns)")]
    SingularDesign { column: usize },

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("optimizer did not converge: {0}")]
    NoConvergence(String),

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("window out of range: {0}")]
    WindowOutOfRange(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("all {attempted} pairs failed; first error: {first}")]
    AllPairsFailed { attempted: usize, first: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
