use thiserror::Error;

/// Errors raised by the estimation kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("series is constant (zero standard deviation)")]
    ConstantSeries,

    #[error("design matrix is rank deficient for polynomial order {order}")]
    SingularDesign { order: usize },

    #[error("too few points: {n} observations for {bins} bins")]
    TooFewPoints { n: usize, bins: usize },

    #[error("counts sum to {sum}, expected {n}")]
    CountMismatch { sum: u64, n: u64 },

    #[error("entropy estimate is already bias corrected")]
    AlreadyCorrected,

    #[error("|rho| = {0} >= 1: mutual information is infinite")]
    PerfectCorrelation(f64),

    #[error("series too short: length {len}, need more than {need}")]
    TooShort { len: usize, need: usize },

    #[error("invalid probabilities: {0}")]
    InvalidProbabilities(String),

    #[error("mutual information {mi:.6} nats is below the dependence threshold {threshold}")]
    NoDependence { mi: f64, threshold: f64 },

    #[error("series has zero variance")]
    ZeroVariance,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("calibration failed: {0}")]
    CalibrationFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
