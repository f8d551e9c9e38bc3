use thiserror::Error;

/// Errors shared across the solver and composition modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: N = {0} (must be >= 1)")]
    InvalidDimension(i64),

    #[error("exponent q = {q} outside the admissible range (1, {upper})")]
    InvalidExponent { q: f64, upper: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("operation undefined in this regime: {0}")]
    Regime(String),

    #[error("step size underflow at rho = {rho} (h = {h}); problem too stiff")]
    Stiffness { rho: f64, h: f64 },

    #[error("requested item not found: {0}")]
    NotFound(String),

    #[error("iteration failed to converge after {iters} iterations (last value {last})")]
    Convergence { iters: usize, last: f64 },

    #[error("linear solver breakdown: {0}")]
    Solver(String),

    #[error("rasterization produced an empty interior (h = {h})")]
    EmptyDomain { h: f64 },

    #[error("grid mask is not invariant under the requested reflection")]
    Symmetry,

    #[error("unsupported domain for this check: {0}")]
    UnsupportedDomain(String),

    #[error("ball union is not q-admissible: {0}")]
    Inadmissible(String),

    #[error("empty spin vector: at least one component must be active")]
    InvalidSpin,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
