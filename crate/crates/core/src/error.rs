use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid fiber: {0}")]
    InvalidFiber(String),

    #[error("node {node} out of range (profile has {len} nodes)")]
    NodeOutOfRange { node: usize, len: usize },

    #[error("warp factor non-positive at interior node {node} (b = {value})")]
    NonPositiveWarp { node: usize, value: f64 },

    #[error("stencil at node {node} reaches past a frozen boundary")]
    StencilUnderflow { node: usize },

    #[error("degenerate plane: vectors are linearly dependent")]
    DegeneratePlane,

    #[error("dimension {dim} outside supported range {min}..={max}")]
    DimensionOutOfRange { dim: usize, min: usize, max: usize },

    #[error("search budget must be non-zero")]
    ZeroBudget,

    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("time step {dt} violates the CFL limit {limit}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("singularity at t = {t}: {reason}")]
    Singularity { t: f64, reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("not enough snapshots: need {need}, have {have}")]
    NotEnoughSnapshots { need: usize, have: usize },

    #[error("empty time window after rescaling")]
    EmptyWindow,

    #[error("requested range is outside the grid: {0}")]
    OutOfGrid(String),

    #[error("profile must be capped for {0}")]
    NotCapped(&'static str),

    #[error("seed ({node}, t = {t}) does not satisfy scal > 4^k / t")]
    InvalidSeed { node: usize, t: f64 },

    #[error("completeness violated: phi'(0) = {phi_prime} < -C/sqrt(n) = {limit}")]
    Incomplete { phi_prime: f64, limit: f64 },

    #[error("bound not applicable: {0}")]
    NotApplicable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
