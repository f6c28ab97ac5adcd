//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// All elements of the tensor are equal, so range-based quantization
    /// has no bins to assign.
    #[error("constant tensor: all values equal, quantization range is zero")]
    ConstantTensor,

    #[error("tensor contains NaN or infinite values")]
    NonFinite,

    #[error("pre-activation maximum must be positive, got {0}")]
    BadMax(f64),

    #[error("radix must be an odd integer >= 3, got {0}")]
    InvalidRadix(u32),

    #[error("value {value} outside weight alphabet [{lo}, {hi}]")]
    OutOfAlphabet { value: i32, lo: i32, hi: i32 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("read voltage {voltage} V reaches switching threshold {threshold} V")]
    ReadVoltageExceedsThreshold { voltage: f64, threshold: f64 },

    #[error("kernel {kh}x{kw} larger than image {h}x{w}")]
    KernelTooLarge {
        kh: usize,
        kw: usize,
        h: usize,
        w: usize,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// The forward cache handed to the backward pass belongs to a
    /// different step than the current optimizer state.
    #[error("stale cache: forward pass was taken at step {cache_step}, state is at step {state_step}")]
    StaleCache { cache_step: u64, state_step: u64 },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code convention: 1 for I/O and parse failures,
    /// 2 for domain errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::Format(_) => 1,
            _ => 2,
        }
    }
}
