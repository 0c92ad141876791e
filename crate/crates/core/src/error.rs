use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("invalid sample: {0}")]
    Sample(String),

    #[error("evaluation-domain error at x = {x}: {detail}")]
    Domain { x: f64, detail: String },

    #[error("index {index} out of range for a sample of length {len}")]
    Index { index: usize, len: usize },

    #[error("{0} has no exact log-derivative")]
    Capability(String),

    #[error("track too short: {len} points, need at least {min}")]
    TrackTooShort { len: usize, min: usize },

    #[error("singular point at x = {x}: {detail}")]
    Singular { x: f64, detail: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("infinite order: {0}")]
    InfiniteOrder(String),

    #[error("degenerate grid: {0}")]
    Degenerate(String),

    #[error("integrand not finite at angle t = {angle} on radius {r}")]
    Singularity { r: f64, angle: f64 },

    #[error("unbounded on circle of radius {0}")]
    Unbounded(f64),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("csv: {0}")]
    Csv(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
