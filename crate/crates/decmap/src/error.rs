use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("vector length {len} does not match {rows}x{cols}")]
    LengthMismatch { len: usize, rows: usize, cols: usize },

    #[error("matrix is not Hermitian: relative asymmetry {asymmetry:.3e} exceeds {tol:.3e}")]
    NonHermitian { asymmetry: f64, tol: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    EigNonConvergence { sweeps: usize, off: f64 },

    #[error("map is not completely positive: minimal Choi eigenvalue {min_eig:.3e} below -{tol:.3e}")]
    NotCp { min_eig: f64, tol: f64 },

    #[error("iteration cap {max_iterations} reached, residual {residual:.3e}")]
    IterationCap { max_iterations: usize, residual: f64 },

    #[error("singular intermediate map at t={t}: condition number {cond:.3e} exceeds cap {cap:.3e}")]
    SingularIntermediateMap { t: f64, cond: f64, cap: f64 },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("scenario schema error: {0}")]
    Schema(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
