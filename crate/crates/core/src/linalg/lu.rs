use super::{CMatrix, LinalgError};
use crate::prelude::*;

/// Relative pivot threshold below which a matrix is declared singular.
const PIVOT_TOL: f64 = 1e-14;

/// LU factorization with partial pivoting, `P·A = L·U`.
#[derive(Clone, Debug)]
pub struct Lu {
    factors: CMatrix,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    /// Factors a square matrix.
    ///
    /// A pivot is rejected when its modulus falls below `1e-14` times the
    /// largest modulus in the corresponding row of the input.
    pub fn new(a: &CMatrix) -> Result<Self, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::DimensionMismatch("LU needs a square matrix"));
        }
        if !a.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        let n = a.rows();
        let row_scale: Vec<f64> = (0..n)
            .map(|i| a.row(i).iter().fold(0.0f64, |m, v| m.max(v.norm())))
            .collect();
        let mut f = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (p, pmag) =
                (k..n)
                    .map(|i| (i, f[(i, k)].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmag <= PIVOT_TOL * row_scale[perm[p]] || pmag == 0.0 {
                return Err(LinalgError::Singular { column: k, pivot: pmag });
            }
            if p != k {
                for j in 0..n {
                    let tmp = f[(k, j)];
                    f[(k, j)] = f[(p, j)];
                    f[(p, j)] = tmp;
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = f[(k, k)];
            for i in k + 1..n {
                let l = f[(i, k)] / pivot;
                f[(i, k)] = l;
                if l == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let u = f[(k, j)];
                    f[(i, j)] -= l * u;
                }
            }
        }
        Ok(Lu {
            factors: f,
            perm,
            swaps,
        })
    }

    pub fn dim(&self) -> usize {
        self.factors.rows()
    }

    /// Row permutation: row `i` of `P·A` is row `perm()[i]` of `A`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn lower(&self) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(1.0, 0.0)
            } else if i > j {
                self.factors[(i, j)]
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn upper(&self) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |i, j| {
            if i <= j {
                self.factors[(i, j)]
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn det(&self) -> C64 {
        let d: C64 = (0..self.dim()).map(|i| self.factors[(i, i)]).product();
        if self.swaps % 2 == 1 {
            -d
        } else {
            d
        }
    }

    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.factors[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.factors[(i, j)] * x[j];
            }
            x[i] = s / self.factors[(i, i)];
        }
        x
    }

    pub fn solve(&self, b: &CMatrix) -> CMatrix {
        assert_eq!(b.rows(), self.dim());
        let mut out = CMatrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let x = self.solve_vec(&b.column(j));
            out.set_column(j, &x);
        }
        out
    }
}

/// Solves `A·X = B` by LU with partial pivoting.
pub fn lu_solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, LinalgError> {
    if b.rows() != a.rows() {
        return Err(LinalgError::DimensionMismatch("right-hand side row count"));
    }
    Ok(Lu::new(a)?.solve(b))
}
