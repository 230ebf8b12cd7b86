use coprime_floors::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    /// 2 for bad input, 3 for precision exhaustion, 4 for resource limits.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                CoreError::InvalidSpec(_) | CoreError::Parse { .. } | CoreError::Precondition(_) => 2,
                CoreError::PrecisionExhausted { .. } => 3,
                CoreError::ResourceLimit(_) => 4,
                _ => 1,
            },
            CliError::Io(_) | CliError::Output(_) => 1,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
