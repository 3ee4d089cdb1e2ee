//! Contour-integral solver for polynomial eigenvalue problems with
//! eigenvector nonlinearities, `T(x, z) · x = 0`.
//!
//! The eigenvalues inside a closed contour are recovered from the poles of
//! trace functions. For every shift `a`, the solutions of the square system
//! `T(x, z) · x − a(x) = 0` are continued around the contour, and their
//! coordinates are summed. The resulting trace matrix `U(z)` is integrated
//! with the trapezoidal rule. Its moments feed a block Hankel pencil that
//! yields the eigenvalues and eigenvectors, as in Beyn's method.
//!
//! The crate is `no_std` (it needs `alloc`). The `parallel` feature turns on
//! column-parallel tracking through rayon and per-phase wall-clock timing.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![allow(clippy::needless_range_loop, clippy::type_complexity)]

extern crate alloc;

pub mod beyn;
pub mod contour;
pub mod counts;
pub mod extraction;
pub mod linalg;
pub mod poly;
pub mod repv;
pub mod rng;
pub mod solver;
pub mod trace;
pub mod tracker;

mod exec;

pub(crate) mod prelude {
    pub(crate) use crate::C64;
    pub(crate) use alloc::vec;
    pub(crate) use alloc::vec::Vec;
    // Inherent float methods win when std is linked.
    #[allow(unused_imports)]
    pub(crate) use num_traits::Float;
}

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

pub use contour::{Contour, NodeGrid};
pub use extraction::Eigenpair;
pub use linalg::CMatrix;
pub use poly::{PolyMatrixT, ShiftStyle, ShiftVector, SquareSystem, XPoly, XTerm, ZPoly};
pub use solver::{solve, SolveConfig, SolveReport};
pub use tracker::{SolutionSet, TrackOptions};
