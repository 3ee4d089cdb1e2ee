use super::{eig::schur, CMatrix, LinalgError};
use crate::prelude::*;

/// Horner evaluation of a polynomial with ascending coefficients.
pub fn eval_poly(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// All roots of the polynomial with ascending coefficients `coeffs`, as the
/// eigenvalues of its companion matrix.
pub fn poly_roots(coeffs: &[C64]) -> Result<Vec<C64>, LinalgError> {
    let lead = *coeffs.last().ok_or(LinalgError::ZeroLeadingCoefficient)?;
    if lead == C64::new(0.0, 0.0) {
        return Err(LinalgError::ZeroLeadingCoefficient);
    }
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Err(LinalgError::DimensionMismatch("polynomial degree must be at least one"));
    }
    let mut companion = CMatrix::zeros(deg, deg);
    for j in 0..deg {
        companion[(0, j)] = -coeffs[deg - 1 - j] / lead;
    }
    for i in 1..deg {
        companion[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    let s = schur(&companion)?;
    Ok((0..deg).map(|i| s.t[(i, i)]).collect())
}
