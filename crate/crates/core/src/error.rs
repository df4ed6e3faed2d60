use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("group of size {required} exceeds the enumeration cap {cap}; raise the cap to at least {required}")]
    SizeLimit { required: u128, cap: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A Fourier bin fell below the magnitude floor, so the signal is not generic.
    #[error("genericity violation: power at bin {bin} is {power:e}, floor is {floor:e}")]
    Genericity { bin: usize, power: f64, floor: f64 },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
