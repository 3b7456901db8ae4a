use thiserror::Error;

pub type ServiceResult<T> = std::result::Result<T, ServiceError>;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Load {
        context: String,
        #[source]
        source: halcyon_core::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
