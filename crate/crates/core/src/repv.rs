//! Rational problems `T(x, z) = A + zB + Σ_k (r_k(x)/s_k(x))·T_k`, solved
//! through the polynomial lift in `(x, λ)` with `s_k(x)·λ_k = r_k(x)`.

use crate::contour::Contour;
use crate::counts::repv_count;
use crate::extraction::EigenProblem;
use crate::linalg::{norm2, CMatrix};
use crate::poly::{SquareSystem, XPoly, XTerm, ZPoly};
use crate::prelude::*;
use crate::rng::{derive_seed, stream, unit_complex, Stream};
use crate::solver::{run_columns, Columns, SolveConfig, SolveError, SolveReport};

/// `|s_k(x)|` below this multiple of `‖x‖` marks a degenerate denominator.
pub const DENOMINATOR_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RepvError {
    #[error("ZeroDenominator({0}): denominator form {0} is identically zero")]
    ZeroDenominator(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
}

#[derive(Clone, Debug, PartialEq)]
pub struct REPvProblem {
    n: usize,
    a: CMatrix,
    b: CMatrix,
    t: Vec<CMatrix>,
    r: Vec<Vec<C64>>,
    s: Vec<Vec<C64>>,
}

fn dot(c: &[C64], x: &[C64]) -> C64 {
    c.iter().zip(x).map(|(a, b)| a * b).sum()
}

impl REPvProblem {
    pub fn new(a: CMatrix, b: CMatrix, t: Vec<CMatrix>, r: Vec<Vec<C64>>, s: Vec<Vec<C64>>) -> Result<Self, RepvError> {
        let n = a.rows();
        let square = |m: &CMatrix| m.rows() == n && m.cols() == n;
        if !square(&a) || !square(&b) || !t.iter().all(square) {
            return Err(RepvError::DimensionMismatch("A, B and T_k must be n×n"));
        }
        if r.len() != t.len() || s.len() != t.len() {
            return Err(RepvError::DimensionMismatch("need one r_k and s_k per T_k"));
        }
        if r.iter().chain(&s).any(|v| v.len() != n) {
            return Err(RepvError::DimensionMismatch("linear forms must have n coefficients"));
        }
        if let Some(k) = s.iter().position(|v| v.iter().all(|c| *c == C64::new(0.0, 0.0))) {
            return Err(RepvError::ZeroDenominator(k + 1));
        }
        Ok(REPvProblem { n, a, b, t, r, s })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of rational terms.
    pub fn m(&self) -> usize {
        self.t.len()
    }

    /// The matrix `T(x, z)`.
    pub fn eval_matrix(&self, x: &[C64], z: C64) -> CMatrix {
        let mut out = self.a.add(&self.b.scale(z));
        for k in 0..self.m() {
            out.axpy(dot(&self.r[k], x) / dot(&self.s[k], x), &self.t[k]);
        }
        out
    }

    /// Whether some `|s_k(x)|` falls below [`DENOMINATOR_TOL`]`·‖x‖`.
    pub fn denominator_degenerate(&self, x: &[C64]) -> bool {
        let x = &x[..self.n];
        let scale = DENOMINATOR_TOL * norm2(x);
        self.s.iter().any(|sk| dot(sk, x).norm() < scale)
    }

    /// The lifted system with constant shift `shift` in `n + m` unknowns.
    pub fn lift(&self, shift: &[C64]) -> Result<SquareSystem, RepvError> {
        if shift.len() != self.n {
            return Err(RepvError::DimensionMismatch("shift length"));
        }
        let (n, m) = (self.n, self.m());
        let nv = n + m;
        let unit = |k: usize| {
            let mut e = vec![0u32; nv];
            e[k] = 1;
            e
        };
        let pair = |j: usize, k: usize| {
            let mut e = vec![0u32; nv];
            e[j] += 1;
            e[k] += 1;
            e
        };
        let mut rows = Vec::with_capacity(nv);
        for i in 0..n {
            let mut terms = Vec::new();
            for j in 0..n {
                terms.push(XTerm::new(unit(j), ZPoly::new(vec![self.a[(i, j)], self.b[(i, j)]])));
                for k in 0..m {
                    terms.push(XTerm::new(pair(j, n + k), ZPoly::constant(self.t[k][(i, j)])));
                }
            }
            terms.push(XTerm::new(vec![0; nv], ZPoly::constant(-shift[i])));
            rows.push(XPoly::new(nv, terms).expect("consistent length"));
        }
        for k in 0..m {
            let mut terms = Vec::new();
            for j in 0..n {
                terms.push(XTerm::new(pair(j, n + k), ZPoly::constant(self.s[k][j])));
                terms.push(XTerm::new(unit(j), ZPoly::constant(-self.r[k][j])));
            }
            rows.push(XPoly::new(nv, terms).expect("consistent length"));
        }
        Ok(SquareSystem::from_rows(rows).expect("square by construction"))
    }

    /// `n` constant shift vectors with unit-modulus entries.
    pub fn shifts(&self, seed: u64) -> Vec<Vec<C64>> {
        (0..self.n)
            .map(|j| {
                let mut rng = stream(derive_seed(seed, j as u64), Stream::Shifts);
                (0..self.n).map(|_| unit_complex(&mut rng)).collect()
            })
            .collect()
    }

    /// Solutions per column predicted by the lift's count formula.
    pub fn predicted_delta(&self) -> Option<usize> {
        let r = repv_count(self.n as u64, self.m() as u64).ok()?;
        usize::try_from(r.delta).ok()
    }
}

impl EigenProblem for REPvProblem {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[C64], z: C64) -> Vec<C64> {
        self.eval_matrix(x, z).matvec(x)
    }

    fn unshifted_system(&self) -> SquareSystem {
        self.lift(&vec![C64::new(0.0, 0.0); self.n])
            .expect("shift has length n")
    }

    fn lift(&self, x: &[C64], _z: C64) -> Vec<C64> {
        let mut y = x.to_vec();
        y.extend((0..self.m()).map(|k| dot(&self.r[k], x) / dot(&self.s[k], x)));
        y
    }
}

/// Runs the contour pipeline on the lifted system; traces sum only the
/// `x`-coordinates and residuals use the rational `T`.
pub fn solve_repv(problem: &REPvProblem, contour: &Contour, cfg: &SolveConfig) -> Result<SolveReport, SolveError> {
    cfg.validate()?;
    let systems = problem
        .shifts(cfg.seed)
        .iter()
        .map(|a| problem.lift(a))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| SolveError::Config("shift length"))?;
    let watch = |y: &[C64]| problem.denominator_degenerate(y);
    run_columns(
        problem,
        contour,
        cfg,
        Columns {
            systems,
            trace_dims: problem.n(),
            expected: cfg.expected_delta.or_else(|| problem.predicted_delta()),
            degenerate: Some(&watch),
        },
    )
}
