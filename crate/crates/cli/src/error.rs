use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] lietaut::Error),
    #[error("report error: {0}")]
    Report(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 3,
            CliError::Report(_) => 4,
            CliError::Core(_) => 5,
            CliError::Io(_) => 6,
        }
    }
}
