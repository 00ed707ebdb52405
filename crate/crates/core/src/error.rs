use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid fluid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid functions live on different grids or have wrong length ({0})")]
    ShapeMismatch(String),

    #[error("tail tolerance violated: |u| = {max_tail:.3e} in the outer eighth exceeds {tol:.3e}")]
    TailViolation { max_tail: f64, tol: f64 },

    #[error("dense assembly needs N = {n} but the cap is {cap}")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("vorticity system is numerically singular (smallest singular value {sigma_min:.3e})")]
    SingularSystem { sigma_min: f64 },

    #[error("time step {dt:.3e} violates the CFL bound; admissible dt <= {max_dt:.3e}")]
    CflViolation { dt: f64, max_dt: f64 },

    #[error("local symbol alpha is not positive (min {min_alpha:.3e}); use the rk4 scheme")]
    NonPositiveAlpha { min_alpha: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {msg}")]
    Config { path: String, msg: String },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
