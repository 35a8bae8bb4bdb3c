use thiserror::Error;

/// Errors produced by the laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("invalid gain range: {0}")]
    InvalidGainRange(String),

    #[error("invalid channel gains: {0}")]
    InvalidGains(String),

    #[error("expected {expected} channel inputs, got {got}")]
    InputLength { expected: usize, got: usize },

    #[error("delta out of range: {0} (must lie in (0, 1))")]
    DeltaOutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported scheme: {0}")]
    UnsupportedScheme(String),

    #[error("enumeration cap exceeded: {needed} points > cap {cap}")]
    EnumerationCap { needed: u128, cap: usize },

    #[error("quadrature tolerance not reached: best {best} bits, achieved tolerance {achieved}")]
    Tolerance { best: f64, achieved: f64 },

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("invalid power grid: {0}")]
    InvalidGrid(String),

    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),

    #[error("invalid output path: {0}")]
    InvalidPath(String),

    #[error("manifest mismatch: {0}")]
    Manifest(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidTopology(_) => "invalid_topology",
            Error::InvalidGainRange(_) => "invalid_gain_range",
            Error::InvalidGains(_) => "invalid_gains",
            Error::InputLength { .. } => "input_length",
            Error::DeltaOutOfRange(_) => "delta_out_of_range",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::UnsupportedScheme(_) => "unsupported_scheme",
            Error::EnumerationCap { .. } => "enumeration_cap",
            Error::Tolerance { .. } => "tolerance",
            Error::InvalidMixture(_) => "invalid_mixture",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::InvalidPerturbation(_) => "invalid_perturbation",
            Error::InvalidPath(_) => "invalid_path",
            Error::Manifest(_) => "manifest",
            Error::Io(_) => "io",
        }
    }
}

impl Error {
    /// True for errors caused by invalid input rather than by the computation.
    pub fn is_invalid_input(&self) -> bool {
        !matches!(
            self,
            Error::EnumerationCap { .. } | Error::Tolerance { .. } | Error::Manifest(_) | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
