use thiserror::Error;

/// Errors produced by estimation, simulation and I/O routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("point {index} lies outside the observation window")]
    PointOutsideWindow { index: usize },

    #[error("duplicate point at index {index}")]
    DuplicatePoint { index: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {0} (supported: 2 and 3)")]
    UnsupportedDimension(usize),

    #[error("taper window does not match the pattern window")]
    WindowMismatch,

    #[error("DFT is already debiased")]
    AlreadyDebiased,

    #[error("empty taper list")]
    EmptyTaperList,

    #[error("operation `{op}` does not support taper `{taper}`")]
    UnsupportedTaper { op: &'static str, taper: String },

    #[error("unsupported Bessel order {0}")]
    UnsupportedBesselOrder(f64),

    #[error("quadrature did not converge in `{op}` (estimated error {error:e})")]
    QuadratureNonConvergent { op: &'static str, error: f64 },

    #[error("insufficient quadrature extent in `{op}`")]
    InsufficientExtent { op: &'static str },

    #[error("kernel is not symmetric: imaginary residual {residual:e}")]
    AsymmetricKernel { residual: f64 },

    #[error("search exhausted without reaching threshold {epsilon}")]
    SearchExhausted { epsilon: f64 },

    #[error("empty fit range")]
    EmptyFitRange,

    #[error("all bins are empty")]
    AllBinsEmpty,

    #[error("empty band")]
    EmptyBand,

    #[error("curvature must be positive, got {0}")]
    NonPositiveCurvature(f64),

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("grid is not a regular product grid")]
    NotAProductGrid,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no theoretical pair correlation available for {0}; install a literature form")]
    MissingPcf(String),

    #[error("no points")]
    NoPoints,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of numerical procedures (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNonConvergent { .. }
                | Error::InsufficientExtent { .. }
                | Error::SearchExhausted { .. }
                | Error::AsymmetricKernel { .. }
                | Error::EmptyFitRange
                | Error::AllBinsEmpty
                | Error::EmptyBand
                | Error::NonPositiveCurvature(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
