use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value lies outside the domain of the operation (index past the curve,
    /// cell outside the grid, probability outside [0,1], ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("validation error: {0}")]
    Validation(String),

    /// The polygon covers no cell centre at the requested curve order.
    #[error("polygon rasterizes to no cells at order {0}")]
    EmptyGeometry(u8),

    #[error("duplicate polygon id {0}")]
    DuplicateId(u64),

    #[error("curve order mismatch: expected {expected}, found {found}")]
    OrderMismatch { expected: u8, found: u8 },

    #[error("not implemented: {0}")]
    NotImplemented(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("bad request: {0}")]
    BadRequest(String),

    #[error("unsupported format in {entry}: {message}")]
    UnsupportedFormat { entry: String, message: String },

    #[error("corrupt entry {entry}: {message}")]
    Corruption { entry: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Zip(#[from] zip::result::ZipError),

    #[error(transparent)]
    Image(#[from] image::ImageError),
}

impl Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse { offset, message: message.into() }
    }

    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }
}
