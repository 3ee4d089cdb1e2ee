//! Dense complex linear algebra for the small matrices of the extraction
//! phase: LU solves, SVD, nonsymmetric eigendecomposition and polynomial
//! roots through companion matrices.

mod eig;
mod lu;
mod matrix;
mod roots;
mod svd;

pub use eig::{eig_dense, schur, EigenDecomposition, Schur};
pub use lu::{lu_solve, Lu};
pub use matrix::{norm2, CMatrix};
pub use roots::{eval_poly, poly_roots};
pub use svd::{svd, Svd};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is singular (pivot {pivot:.3e} at column {column})")]
    Singular { column: usize, pivot: f64 },
    #[error("iteration did not converge within {iterations} iterations ({converged} of {total} values converged)")]
    NoConvergence {
        iterations: usize,
        converged: usize,
        total: usize,
    },
    #[error("leading coefficient is zero")]
    ZeroLeadingCoefficient,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("matrix contains non-finite entries")]
    NonFinite,
}
