use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("data file: {0}")]
    Data(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Output(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<spinbragg::polarizability::SpeciesError> for CliError {
    fn from(e: spinbragg::polarizability::SpeciesError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<spinbragg::polarizability::PolarizabilityError> for CliError {
    fn from(e: spinbragg::polarizability::PolarizabilityError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<spinbragg::bragg_dynamics::DynamicsError> for CliError {
    fn from(e: spinbragg::bragg_dynamics::DynamicsError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<spinbragg::interferometer::InterferometerError> for CliError {
    fn from(e: spinbragg::interferometer::InterferometerError) -> Self {
        CliError::Numerical(e.to_string())
    }
}
