use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("InvalidM: number of receivers must be an integer >= 2 (got {0})")]
    InvalidM(usize),

    #[error("InvalidPower: transmit power must be finite and > 0 (got {0})")]
    InvalidPower(f64),

    #[error("InvalidGain: state gain must be finite and >= 0 (got {0})")]
    InvalidGain(f64),

    #[error(
        "InfeasibleRho: correlation {rho} is outside [-1/(M-1), 1] = [{lower}, 1] for M = {m}"
    )]
    InfeasibleRho { m: usize, rho: f64, lower: f64 },

    #[error("WrongModel: {0}")]
    WrongModel(String),

    #[error("InvalidSplit: power split alpha_bar must lie in [0, 1] (got {0})")]
    InvalidSplit(f64),

    #[error("Domain: {0}")]
    Domain(String),

    #[error("DegenerateCovariance: {0}")]
    DegenerateCovariance(String),

    #[error("InvalidSampleCount: need at least {min} samples (got {got})")]
    InvalidSampleCount { min: usize, got: usize },

    #[error("InvalidGrid: {0}")]
    InvalidGrid(String),
}

impl Error {
    /// Short machine-readable tag, used in CSV error markers.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidM(_) => "InvalidM",
            Error::InvalidPower(_) => "InvalidPower",
            Error::InvalidGain(_) => "InvalidGain",
            Error::InfeasibleRho { .. } => "InfeasibleRho",
            Error::WrongModel(_) => "WrongModel",
            Error::InvalidSplit(_) => "InvalidSplit",
            Error::Domain(_) => "Domain",
            Error::DegenerateCovariance(_) => "DegenerateCovariance",
            Error::InvalidSampleCount { .. } => "InvalidSampleCount",
            Error::InvalidGrid(_) => "InvalidGrid",
        }
    }
}
