use thiserror::Error;

/// Errors raised by the spectral and nodal routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{operation} is not supported for {surface}")]
    Unsupported {
        operation: &'static str,
        surface: String,
    },

    #[error("spectrum enumerated below {covered} but at least {required} is needed")]
    SpectrumTooShort { covered: f64, required: f64 },

    #[error("{value} is not an eigenvalue of {surface}")]
    NotAnEigenvalue { value: f64, surface: String },

    #[error("mode {0} is not admissible on this surface")]
    InadmissibleMode(String),

    #[error("modes {first} and {second} belong to different eigenvalues")]
    MixedEigenvalues { first: String, second: String },

    #[error("eigenfunction has no nonzero coefficient")]
    ZeroFunction,

    #[error("{zero_fraction:.4} of the grid cells fall inside the zero band (limit 0.01); lower the tolerance")]
    TooManyZeroCells { zero_fraction: f64 },

    #[error("nodal count did not stabilise: counts {counts:?} at widths {widths:?}")]
    UnstableCount {
        counts: Vec<usize>,
        widths: Vec<usize>,
    },

    #[error("eigenspace of dimension {0} is too large to sweep (limit 5)")]
    DimensionTooLarge(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
