use thiserror::Error;

/// Errors for construction, validation, and numerical preconditions.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval: lo={lo} > hi={hi}")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("invalid finite gap set: {0}")]
    InvalidSet(String),

    #[error("invalid Krein function: {0}")]
    InvalidKrein(String),

    #[error("x={0} is a breakpoint; boundary value is not defined there")]
    AtBreakpoint(f64),

    #[error("no 0->1 jump at mu={0}; no point mass there")]
    NoAtomAt(f64),

    #[error("Krein function is not in X(K): {0}")]
    NotInXk(String),

    #[error("invalid spectral measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid split spec: {0}")]
    InvalidSplit(String),

    #[error("invalid Jacobi window: {0}")]
    InvalidJacobi(String),

    #[error("site n={n} is less than {margin} sites from the window edge")]
    TooCloseToEdge { n: i64, margin: usize },

    #[error("invalid torus point: {0}")]
    InvalidTorusPoint(String),

    #[error("subdivision bands too wide: (n-1)*delta = {total} >= gap length {gap_len}")]
    BandsTooWide { total: f64, gap_len: f64 },

    #[error("band deletions collide on gap ({lo}, {hi}); refine the plan")]
    DeletionCollision { lo: f64, hi: f64 },

    #[error("insufficient clearance around mu={mu}: need {needed}, have {available}")]
    InsufficientClearance {
        mu: f64,
        needed: f64,
        available: f64,
    },

    #[error("no gap of the target set matches gap ({lo}, {hi}) within the 1/10 clearance rule")]
    GapMatchingFailed { lo: f64, hi: f64 },

    #[error("invalid periodic operator: {0}")]
    InvalidPeriodic(String),

    #[error("matrix is not symmetric: |M({i},{j}) - M({j},{i})| = {dev}")]
    NotSymmetric { i: usize, j: usize, dev: f64 },

    #[error("flow blow-up at t={t}: norm {norm} exceeded twice the initial norm")]
    FlowBlowUp { t: f64, norm: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
