use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    UnderResolved(String),
    #[error("{0}")]
    BatteryFailed(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::UnderResolved(_) => 4,
            CliError::BatteryFailed(_) => 5,
        }
    }
}

impl From<heislab::Error> for CliError {
    fn from(e: heislab::Error) -> Self {
        use heislab::Error as E;
        let msg = e.to_string();
        match e {
            E::UnderResolved { .. } => CliError::UnderResolved(msg),
            E::NonFinite(_) | E::NoConvergence { .. } | E::SvdFailure | E::BoxIndexOverflow(_) => {
                CliError::Numerical(msg)
            }
            E::Io(_) => CliError::Io(msg),
            _ => CliError::Config(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
