use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index ({i}, {j}) out of range for a {lx}x{ly} rectangle grid")]
    IndexOutOfRange {
        i: usize,
        j: usize,
        lx: usize,
        ly: usize,
    },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("series for {what} did not converge within {terms} terms (argument {arg})")]
    NonConvergence {
        what: &'static str,
        arg: f64,
        terms: usize,
    },

    #[error("signature needs {required} bytes, exceeding the memory cap of {cap} bytes")]
    MemoryCap { required: u128, cap: u64 },

    #[error("interpolation residual {residual:e} exceeds tolerance {tolerance:e}")]
    IllConditioned { residual: f64, tolerance: f64 },

    #[error("edge polynomials disagree at the shared corner: {g0} vs {h0}")]
    CornerMismatch { g0: f64, h0: f64 },

    #[error("empty batch")]
    EmptyBatch,
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
