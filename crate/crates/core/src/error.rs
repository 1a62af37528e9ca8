use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("image too small: {width}x{height} (minimum {min}x{min})")]
    ImageTooSmall {
        width: usize,
        height: usize,
        min: usize,
    },

    #[error("invalid image buffer: {0}")]
    InvalidImage(String),

    #[error("expected a single-channel image, got {0} channels")]
    NotGrayscale(usize),

    #[error("wrong transform kind: expected {expected}, got {actual}")]
    WrongTransformKind {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("decompositions use different transforms")]
    TransformMismatch,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("feature length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),

    #[error("subband has no coefficients")]
    EmptyBand,

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
