use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch between fields")]
    GridMismatch,

    #[error("position {0:?} lies outside the fixed-vacuum box")]
    OutOfDomain([f64; 3]),

    #[error("field collapse at node {index}: |n| = {norm:e}")]
    FieldCollapse { index: usize, norm: f64 },

    #[error("H is not closed: non-solenoidal fraction {residual:.3e} exceeds {tolerance:.3e}")]
    NotClosed { residual: f64, tolerance: f64 },

    #[error("potential solver diverged after {iterations} iterations (residual {residual:.3e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("degenerate seed: |B| = {magnitude:e} at {position:?}")]
    DegenerateSeed { position: [f64; 3], magnitude: f64 },

    #[error("field line is not closed")]
    OpenCurve,

    #[error("curves too close for a reliable linking number (distance {distance:.3e} < {threshold:.3e})")]
    CurvesTooClose { distance: f64, threshold: f64 },

    #[error("no node comes within {tolerance} of the requested value {value:?}")]
    NoPreimage { value: [f64; 3], tolerance: f64 },

    #[error("field not localized: {outer_fraction:.3} of the energy sits in the outer shell")]
    NotLocalized { outer_fraction: f64 },

    #[error("vortex detected at node {index}: rho = {rho:e}")]
    VortexDetected { index: usize, rho: f64 },

    #[error("relaxation state is not running")]
    NotRunning,

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
