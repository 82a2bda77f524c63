use thiserror::Error;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NsxError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("negative or non-finite time {0}")]
    InvalidTime(f64),
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("mollifier width {width} is below two grid cells ({min})")]
    UnderresolvedMollifier { width: f64, min: f64 },
    #[error("scaled support radius {radius} exceeds a quarter of the box ({limit})")]
    ScaleOutOfBox { radius: f64, limit: f64 },
    #[error("field carries no analytic seed description; exact rescaling is unavailable")]
    NotAnalytic,
    #[error("seed radius {radius} exceeds an eighth of the box ({limit})")]
    SeedOutOfBox { radius: f64, limit: f64 },
    #[error("no calibration record available")]
    NotCalibrated,
    #[error("calibration corpus produced no informative ratio")]
    VacuousCorpus,
    #[error("bootstrap quadratic has no real root (discriminant {discriminant})")]
    NoClosure { discriminant: f64 },
    #[error("Duhamel quadrature under-resolved: {0}")]
    QuadratureUnderResolved(String),
    #[error("Picard iteration did not converge after {iterations} iterations (residual {residual})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("iteration diverged (last valid time {last_valid_time})")]
    Diverged { last_valid_time: f64 },
    #[error("time step {dt} exceeds the stability guard {limit}")]
    StepTooLarge { dt: f64, limit: f64 },
    #[error("cannot partition the interval: {0}")]
    PartitionFailed(String),
    #[error("snapshot format error: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("configuration error: {0}")]
    Config(String),
}

impl From<std::io::Error> for NsxError {
    fn from(e: std::io::Error) -> Self {
        NsxError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for NsxError {
    fn from(e: serde_json::Error) -> Self {
        NsxError::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, NsxError>;
