use thiserror::Error;

/// Errors across the library.
#[derive(Debug, Error)]
pub enum GaborError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("window is not normalized (‖φ‖ = {norm})")]
    UnnormalizedWindow { norm: f64 },

    #[error("not a frame at this density: {0}")]
    NotAFrame(String),

    #[error("iterative solve did not converge: {0}")]
    NonConvergence(String),

    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("aliasing: {0}")]
    Aliasing(String),

    #[error("memory guard: {0}")]
    MemoryGuard(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GaborError>;
