use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate metric in chart {chart} at {point:?}")]
    DegenerateMetric { chart: usize, point: Vec<f64> },

    #[error("point {point:?} lies outside the interior of chart {chart}")]
    Domain { chart: usize, point: Vec<f64> },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("unknown experiment `{id}`; known experiments: {known}")]
    UnknownExperiment { id: String, known: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
