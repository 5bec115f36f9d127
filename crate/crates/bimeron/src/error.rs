use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum BimeronError {
    #[error("grid too coarse: n = {0} (need n >= 8)")]
    GridTooCoarse(usize),

    #[error("undefined direction at node ({0}, {1})")]
    UndefinedDirection(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid lambda: {0} (need 0 < lambda < 1)")]
    InvalidLambda(f64),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("exceptional configuration: degenerate spherical triangle at cell ({0}, {1})")]
    ExceptionalConfiguration(usize, usize),

    #[error("disk only: {0}")]
    DiskOnly(String),

    #[error("circle out of range: center ({0}, {1}), radius {2}")]
    CircleOutOfRange(f64, f64, f64),

    #[error("out of annulus: sample at radius {0} not in [{1}, {2}]")]
    OutOfAnnulus(f64, f64, f64),

    #[error("no core: total energy {0} below threshold {1}")]
    NoCore(f64, f64),

    #[error("loss of coercivity: |lambda| = {0} >= 1")]
    LossOfCoercivity(f64),

    #[error("numerical blowup: non-finite energy at iteration {0}")]
    NumericalBlowup(usize),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, BimeronError>;
