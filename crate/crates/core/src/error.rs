use thiserror::Error;

use crate::picard::PicardDiagnostics;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no data: profile is empty")]
    NoData,

    #[error("non-integrable tail: kernel exponent {kernel} with envelope {envelope} (needs kernel + envelope < -1)")]
    NonIntegrableTail { kernel: f64, envelope: f64 },

    #[error("radius {0} lies outside the exterior domain r >= 1")]
    Domain(f64),

    #[error("parameters outside theorem hypotheses: {constraint} violated ({detail})")]
    Inadmissible { constraint: &'static str, detail: String },

    #[error("axisymmetric mode has no ζ")]
    AxisymmetricMode,

    #[error("mode mismatch: expected {expected}, got {got}")]
    ModeMismatch { expected: String, got: i32 },

    #[error("boundary condition violated: moment residual {residual:e} exceeds {tolerance:e}")]
    BoundaryConditionViolated { residual: f64, tolerance: f64 },

    #[error("cutoff mismatch: {0} vs {1}")]
    CutoffMismatch(usize, usize),

    #[error("grid mismatch: profile has {got} values, grid has {expected} nodes")]
    GridMismatch { expected: usize, got: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("outside contraction regime (data too large)")]
    NonContraction(Box<PicardDiagnostics>),

    #[error("Picard iteration did not converge within {max_iter} iterations")]
    MaxIterExceeded {
        max_iter: usize,
        diagnostics: Box<PicardDiagnostics>,
    },

    #[error("decay fit needs strictly positive magnitudes; got {value} at r = {radius}")]
    NonPositiveMagnitude { radius: f64, value: f64 },

    #[error("invalid fit window [{lo}, {hi}]: {reason}")]
    FitWindow { lo: f64, hi: f64, reason: String },

    #[error("test function support [{lo}, {hi}]: {reason}")]
    TestSupport { lo: f64, hi: f64, reason: String },

    #[error("manufactured target rejected: {0}")]
    InvalidTarget(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn inadmissible(constraint: &'static str, detail: impl Into<String>) -> Self {
        Error::Inadmissible {
            constraint,
            detail: detail.into(),
        }
    }
}
