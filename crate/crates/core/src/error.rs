use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("grid needs at least 3 points per axis, got {nx}x{ny}")]
    TooFewPoints { nx: usize, ny: usize },

    #[error("index ({i}, {j}) is outside a {nx}x{ny} grid")]
    IndexOutOfRange { i: usize, j: usize, nx: usize, ny: usize },

    #[error("stencil at boundary index ({i}, {j}) of a bounded grid needs a boundary treatment")]
    BoundaryStencil { i: usize, j: usize },

    #[error("least-squares fit needs at least 3 points, got {0}")]
    TooFewStencilPoints(usize),

    #[error("rank-deficient stencil: sigma_min = {sigma_min:.3e} below threshold {threshold:.3e}")]
    RankDeficient { sigma_min: f64, threshold: f64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("scheme {scheme} cannot run here: {reason}")]
    SchemeGridMismatch { scheme: String, reason: String },

    #[error("phase speed undefined: arcsin argument {0} lies outside [-1, 1]")]
    Evanescent(f64),

    #[error("convergence order needs positive errors, got {0}")]
    NonPositiveError(f64),

    #[error("time step {dt:.6e} exceeds the proven stability bound {bound:.6e}")]
    CflViolation { dt: f64, bound: f64 },

    #[error("instability detected: sup-norm {sup:.3e} at t = {time:.4}")]
    Unstable { sup: f64, time: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
