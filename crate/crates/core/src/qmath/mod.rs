//! Dense complex linear algebra for the small operators of a single cycle.

mod channel;
mod eigen;
mod matrix;

pub use channel::{
    apply_channel, is_density_matrix, unitarity_deviation, validate_projective_pair,
    validate_projective_pair_with, KrausChannel, UnitaryOperator,
};
pub use eigen::{hermitian_eigensystem, hermitian_eigensystem_with, HermitianOperator};
pub use matrix::CMatrix;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QMathError {
    #[error("empty matrix or Kraus list")]
    Empty,

    #[error("matrix is not square: {rows} rows, a row of length {cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("eigendecomposition failed: {reason}")]
    DecompositionFailure { reason: String },

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("channel is not trace preserving (max deviation {deviation:e})")]
    NotTracePreserving { deviation: f64 },

    #[error("channel is not unital (max deviation {deviation:e})")]
    NotUnital { deviation: f64 },
}

/// Absolute max-abs-entry tolerances used by the validating constructors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub hermitian: f64,
    pub eigen: f64,
    pub unitary: f64,
    pub channel: f64,
    pub projector: f64,
    /// Relative gap below which eigenvalues count as one cluster.
    pub degeneracy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-12,
            eigen: 1e-10,
            unitary: 1e-10,
            channel: 1e-10,
            projector: 1e-10,
            degeneracy: 1e-9,
        }
    }
}
