use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: argument out of domain: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("{op}: could not reach the requested accuracy: {detail}")]
    Precision { op: &'static str, detail: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain { op, detail: detail.into() }
}

pub(crate) fn precision(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Precision { op, detail: detail.into() }
}
