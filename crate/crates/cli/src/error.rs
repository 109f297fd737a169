use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("{origin}: malformed JSON: {message}")]
    Json { origin: String, message: String },

    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Core(#[from] dirikit::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
