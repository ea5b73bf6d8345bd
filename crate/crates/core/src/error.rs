use thiserror::Error;

/// Errors raised by the estimation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("insufficient data: need more than {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("memory parameter {d} is outside the stationary region")]
    NonStationary { d: f64 },

    #[error("spectral density has a pole at frequency zero for d = {d}")]
    PoleAtZero { d: f64 },

    #[error("autoregressive roots are too close for the closed-form autocovariance")]
    NearRepeatedRoots,

    #[error("autoregressive polynomial has a root on or inside the unit circle")]
    NonStationaryAr,

    #[error("covariance matrix is numerically singular (prediction variance {variance:e} at step {step})")]
    NumericalPsd { step: usize, variance: f64 },

    #[error("mean design is singular after differencing")]
    SingularDesign,

    #[error("upper bound d_bar = {0} must be at least 0.5")]
    InvalidBound(f64),

    #[error("optimization failed: {0}")]
    OptimFailed(String),

    #[error("every search interval failed")]
    AllIntervalsFailed,

    #[error("d = {d} is within {margin} of the edge of the search range")]
    BoundaryTooClose { d: f64, margin: f64 },

    #[error("profile curvature {0} is not negative")]
    NonPositiveCurvature(f64),

    #[error("adaptive bound exceeded the cap d_bar_max = {0}")]
    CapReached(f64),

    #[error("input series has zero variance")]
    ZeroVariance,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
