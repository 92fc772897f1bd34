//! Error type shared by all engine operations.

use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A point or depth value at or behind the camera plane.
    NonPositiveDepth,
    /// Grid or field dimensions do not agree.
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// Degenerate depth-hypothesis bounds or bin count.
    InvalidRange,
    /// Upsample target smaller than the source grid.
    InvalidTarget,
    /// Mean disparity is zero, normalization undefined.
    ZeroMeanDisparity,
    /// Cost volumes carry different hypothesis sets.
    HypothesisMismatch,
    /// Fusion weight matrix does not match the bin count.
    WeightDimMismatch,
    /// A rendered surface has non-positive depth somewhere in view.
    DegenerateScene,
    /// No ground-truth pixel survives the evaluation protocol.
    NoValidPixels,
    /// Rotation matrix is not orthonormal with unit determinant.
    InvalidRotation,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonPositiveDepth => write!(f, "depth must be strictly positive"),
            Error::ShapeMismatch { expected, got } => write!(
                f,
                "shape mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            Error::InvalidRange => write!(f, "invalid depth-hypothesis range"),
            Error::InvalidTarget => write!(f, "upsample target smaller than source"),
            Error::ZeroMeanDisparity => write!(f, "mean disparity is zero"),
            Error::HypothesisMismatch => write!(f, "cost volumes have different hypothesis sets"),
            Error::WeightDimMismatch => write!(f, "fusion weights do not match bin count"),
            Error::DegenerateScene => write!(f, "scene surface has non-positive depth in view"),
            Error::NoValidPixels => write!(f, "no valid ground-truth pixels"),
            Error::InvalidRotation => write!(f, "rotation is not a proper orthonormal matrix"),
        }
    }
}

#[cfg(test)]
impl std::error::Error for Error {}
