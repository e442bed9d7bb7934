use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QslError {
    #[error("matrix is not Hermitian (max |M - M^H| = {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("negative eigenvalue {value:e} below clipping threshold")]
    NegativeEigenvalue { value: f64 },

    #[error("trace {trace} is not 1")]
    NotUnitTrace { trace: f64 },

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("rank {rank} is invalid for dimension {dim}")]
    BadRank { rank: usize, dim: usize },

    #[error("Bloch vector norm {norm} exceeds 1")]
    BlochNormExceeded { norm: f64 },

    #[error("axis norm {norm} is not 1")]
    BadUnitVector { norm: f64 },

    #[error("generator cannot connect the states: coherence vanishes but angle is {angle:e}")]
    FrozenState { angle: f64 },

    #[error("bad time grid: {0}")]
    BadGrid(String),

    #[error("alpha must be positive, got {0}")]
    BadAlpha(f64),

    #[error("propagation produced an invalid state (min eigenvalue {min_eigenvalue:e})")]
    InvalidStateProduced { min_eigenvalue: f64 },

    #[error("damping basis does not match the generator (deviation {deviation:e})")]
    BasisMismatch { deviation: f64 },

    #[error("target state not reached within t_max = {t_max}")]
    NotReached { t_max: f64 },

    #[error("shots must be positive")]
    ZeroShots,

    #[error("moment order {n} invalid for dimension {dim}")]
    BadN { n: usize, dim: usize },

    #[error("eigenvalue recovery is ill-conditioned: {0}")]
    IllConditioned(String),

    #[error(
        "alignment search did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NoConvergence { iterations: u64, residual: f64 },

    #[error("trace quantity has imaginary residue {value:e}")]
    ImaginaryResidue { value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, QslError>;
