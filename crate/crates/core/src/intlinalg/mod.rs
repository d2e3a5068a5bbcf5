//! Exact integer matrices, Smith normal form, and homology of free chain complexes.

mod complex;
mod matrix;
mod snf;

pub use complex::{homology, validate_complex, ChainComplexZ};
pub use matrix::IntMatrix;
pub use snf::{rank, smith_normal_form, Smith};

use thiserror::Error;

use crate::abelian::AbelianError;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IntLinAlgError {
    #[error("{rows}x{cols} matrix needs {} entries, got {len}", rows * cols)]
    Shape { rows: usize, cols: usize, len: usize },
    #[error("cannot multiply {left:?} by {right:?}")]
    MulShape {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("determinant of non-square {0}x{1} matrix")]
    NotSquare(usize, usize),
    #[error("matrix text: {0}")]
    Parse(String),
    #[error("{ranks} chain groups need {} differentials, got {differentials}", ranks.saturating_sub(1))]
    DifferentialCount { ranks: usize, differentials: usize },
    #[error("d_{p} should be {expected:?}, found {found:?}")]
    DifferentialShape {
        p: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("d_{} d_{p} is not zero", p - 1)]
    NonzeroComposition { p: usize },
    #[error(transparent)]
    Abelian(#[from] AbelianError),
}
