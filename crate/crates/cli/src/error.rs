use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] hypercs_core::Error),
}

impl CliError {
    /// 2 for anything the caller can fix by changing the invocation, 1 for
    /// numerical failures.
    pub fn exit_code(&self) -> ExitCode {
        use hypercs_core::Error as E;
        match self {
            CliError::Core(E::Divergence(_))
            | CliError::Core(E::NonConvergence { .. })
            | CliError::Core(E::Overflow(_))
            | CliError::Core(E::Truncation { .. })
            | CliError::Core(E::TableMismatch)
            | CliError::Core(E::Consistency(_)) => ExitCode::from(1),
            _ => ExitCode::from(2),
        }
    }
}
