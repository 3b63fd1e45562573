//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("spin weight {spin} exceeds band limit {band_limit}")]
    SpinBeyondBandLimit { spin: i32, band_limit: usize },

    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },

    #[error("grids do not match")]
    GridMismatch,

    #[error("metric not positive definite at node {node}")]
    MetricNotPositiveDefinite { node: usize },

    #[error("source has component outside the operator range (cokernel projection {magnitude:.3e} > {tolerance:.3e})")]
    NonSolvableSource { magnitude: f64, tolerance: f64 },

    #[error("iteration did not converge within {iterations} steps (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("caustic detected: r |trchib| = {0:.3e} beyond threshold")]
    CausticDetected(f64),

    #[error("degenerate sphere: area radius {0:.3e}")]
    DegenerateSphere(f64),

    #[error("slice is not spacelike at sampled point")]
    NonSpacelikeSlice,

    #[error("frame normalization violated: {0}")]
    FrameNormalization(String),

    #[error("missing transverse data: {0}")]
    MissingTransverseData(String),

    #[error("contraction failure: discrepancy norm increased twice consecutively")]
    ContractionFailure,

    #[error("gamma {0} outside the admissible window (1/3, 1/2)")]
    GammaOutsideWindow(f64),

    #[error("monotonicity lost: {0}")]
    MonotonicityLost(String),

    #[error("boundary too far from round: {0}")]
    BoundaryNotNearRound(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
