use thiserror::Error;

/// Errors shared across the construction, pruning, and verification layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A grid cube of the stated level contained affinely independent
    /// rationals spanning the full ambient dimension, contradicting the
    /// simplex volume bound the construction relies on.
    #[error("simplex violation: {count} rationals in cube at level {level} span dimension {dim} >= ambient {ambient}")]
    SimplexViolation {
        level: u32,
        count: usize,
        dim: usize,
        ambient: usize,
    },

    /// Vector lengths or ambient dimensions disagree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An affine hull was requested for an empty point set.
    #[error("degenerate flat: no points to span")]
    DegenerateFlat,

    /// An exact power comparison would exceed the configured bit budget.
    #[error("comparison budget exceeded: {bits} bits needed, budget {budget} (set {var} to raise)")]
    BudgetExceeded { bits: u64, budget: u64, var: &'static str },

    /// Construction parameters failed validation.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A stage index outside 0..=max_stage was requested.
    #[error("stage {stage} out of configured range 1..={max}")]
    StageOutOfRange { stage: u32, max: u32 },

    /// An exhaustive sweep would touch more cubes than the configured budget.
    #[error("enumeration budget exceeded: {count} cubes requested, budget {budget}")]
    EnumerationBudget { count: String, budget: u64 },

    /// No surviving first-stage cube fits inside the seed ball.
    #[error("seed failure: no surviving cube of the first pruning level lies inside the seed ball")]
    SeedFailure,

    /// A Vitali cover did not reach the required measure fraction.
    #[error("coverage shortfall for cube at level {level}: achieved {achieved}, target {target} (searched denominators up to {q_reached})")]
    CoverageShortfall {
        level: u32,
        achieved: String,
        target: String,
        q_reached: String,
    },

    /// No surviving cube of the previous pruning level nests inside a shrunk ball.
    #[error("nesting failure: no surviving cube nests inside the shrunk ball of {point}")]
    NestingFailure { point: String },

    /// A linear program was unbounded or infeasible (should not happen for
    /// the geometric distance programs this crate builds).
    #[error("linear program failed: {0}")]
    LpFailure(&'static str),

    /// Box-count scales must be exactly representable as rationals.
    #[error("box-count scale is not an exact rational")]
    InexactScale,

    /// The Hoelder report contains violations, so no dimension certificate
    /// can be issued.
    #[error("certificate refused: {violations} Hoelder violations recorded")]
    CertificateRefused { violations: usize },

    /// A checkpoint or tree file was written by an incompatible schema.
    #[error("schema version mismatch: file has {found}, this build expects {expected}")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
