use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),

    #[error("message {value} outside [0, {modulus})")]
    MessageOutOfRange { value: u64, modulus: u64 },

    #[error("reward {0} outside [0, 1]")]
    RewardOutOfRange(f64),

    #[error("invalid Renyi order {0}")]
    InvalidOrder(f64),

    #[error("no admissible order in the curve's domain")]
    EmptyDomain,

    #[error("unsupported mechanism for exact audit: {0}")]
    UnsupportedMechanism(String),

    #[error("horizon {horizon} too small for {arms} arms (need at least {needed})")]
    HorizonTooSmall { horizon: u64, arms: usize, needed: u64 },

    #[error("dimension mismatch: {0}")]
    MismatchedDimensions(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("run failed for instance {instance_id}, algorithm {label}: {source}")]
    Cell {
        instance_id: usize,
        label: String,
        #[source]
        source: Box<Error>,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }

    /// True for errors caused by user input (bad config or parameters).
    pub fn is_config_error(&self) -> bool {
        match self {
            Error::Config(_) | Error::InvalidParams(_) | Error::UnsupportedCombination(_) => true,
            Error::Cell { source, .. } => source.is_config_error(),
            _ => false,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
