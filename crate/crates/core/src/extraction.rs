//! Block Hankel pencil, rank-revealing SVD and eigenpair recovery.

use crate::contour::Contour;
use crate::linalg::{eig_dense, norm2, svd, CMatrix, LinalgError};
use crate::poly::{assemble_pepv, PolyMatrixT, ShiftVector, SquareSystem};
use crate::prelude::*;
use crate::trace::MomentSet;
use crate::tracker::newton::correct;

/// Largest singular value below which `B0` counts as zero.
pub const RANK_FLOOR: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ExtractError {
    #[error("RankZero: no eigenvalues detected (largest singular value {0:e})")]
    RankZero(f64),
    #[error("ZeroVector: eigenvector is zero")]
    ZeroVector,
    #[error("moment set needs at least two matrices")]
    TooFewMoments,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// An eigenvalue problem whose eigenpairs can be checked and refined.
pub trait EigenProblem {
    /// Length of the eigenvector.
    fn dim(&self) -> usize;
    /// `T(x, z)·x`.
    fn apply(&self, x: &[C64], z: C64) -> Vec<C64>;
    /// Polynomial system `G(y, z) = 0` whose solutions with `y` starting
    /// with `x` are the eigenpairs.
    fn unshifted_system(&self) -> SquareSystem;
    /// Completes an eigenvector to a point `y` of [`Self::unshifted_system`].
    fn lift(&self, x: &[C64], z: C64) -> Vec<C64>;
}

impl EigenProblem for PolyMatrixT {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[C64], z: C64) -> Vec<C64> {
        PolyMatrixT::apply(self, x, z)
    }

    fn unshifted_system(&self) -> SquareSystem {
        assemble_pepv(self, &ShiftVector::zero(self)).expect("valid T assembles")
    }

    fn lift(&self, x: &[C64], _z: C64) -> Vec<C64> {
        x.to_vec()
    }
}

/// `B0` holds blocks `A_{i+j}`, `B1` blocks `A_{i+j+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HankelPair {
    pub b0: CMatrix,
    pub b1: CMatrix,
    pub blocks: usize,
    pub block_rows: usize,
}

pub fn hankel_pair(moms: &MomentSet) -> Result<HankelPair, ExtractError> {
    let m = moms.matrices.len() / 2;
    if m == 0 {
        return Err(ExtractError::TooFewMoments);
    }
    let (p, q) = (moms.matrices[0].rows(), moms.matrices[0].cols());
    let mut b0 = CMatrix::zeros(m * p, m * q);
    let mut b1 = CMatrix::zeros(m * p, m * q);
    for i in 0..m {
        for j in 0..m {
            b0.set_block(i * p, j * q, &moms.matrices[i + j]);
            b1.set_block(i * p, j * q, &moms.matrices[i + j + 1]);
        }
    }
    Ok(HankelPair {
        b0,
        b1,
        blocks: m,
        block_rows: p,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairFlag {
    /// Newton refinement converged and replaced the raw pair.
    Refined,
    /// Refinement did not converge; the raw pair is kept.
    RefineFailed,
    /// Refinement moved `z` by more than `10·√residual`.
    Unstable,
    /// Eigenvalue outside the contour, kept on request.
    Outside,
    /// Residual above the configured threshold, kept on request.
    AboveThreshold,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Eigenpair {
    pub z: C64,
    /// `‖x‖_∞ = 1`, with the first largest entry real and positive.
    pub x: Vec<C64>,
    pub residual: f64,
    pub inside: bool,
    /// `σ_ℓ/σ_{ℓ+1}` at the rank cut (infinite when no cut was needed).
    pub sigma_gap: f64,
    pub flags: Vec<PairFlag>,
}

impl Eigenpair {
    pub fn has(&self, flag: PairFlag) -> bool {
        self.flags.contains(&flag)
    }
}

/// Scales `x` so the first entry of maximal modulus becomes 1.
pub fn normalize_eigenvector(x: &[C64]) -> Option<Vec<C64>> {
    let big = x.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    if !big.is_finite() || big <= 0.0 {
        return None;
    }
    let k = x.iter().position(|v| v.norm() >= big * (1.0 - 1e-12))?;
    let pivot = x[k];
    let mut out: Vec<C64> = x.iter().map(|v| v / pivot).collect();
    out[k] = C64::new(1.0, 0.0);
    Some(out)
}

/// `‖T(x, z)·x‖ / ‖x‖`.
pub fn residual<P: EigenProblem + ?Sized>(problem: &P, x: &[C64], z: C64) -> Result<f64, ExtractError> {
    let nx = norm2(x);
    if nx == 0.0 {
        return Err(ExtractError::ZeroVector);
    }
    Ok(norm2(&problem.apply(x, z)) / nx)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtractOptions {
    pub tol_rank: f64,
    pub keep_outside: bool,
    /// Absolute floor below which singular values count as noise; never
    /// lower than [`RANK_FLOOR`].
    pub noise_floor: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            tol_rank: 1e-8,
            keep_outside: false,
            noise_floor: RANK_FLOOR,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Extraction {
    pub pairs: Vec<Eigenpair>,
    pub rank: usize,
    pub singular_values: Vec<f64>,
    /// The rank reached the pencil size, so `M` may be too small.
    pub rank_saturated: bool,
    /// Eigenvalues found outside the contour and dropped.
    pub dropped_outside: usize,
}

/// Eigenpairs from the Hankel pencil.
///
/// Eigenvalues of the reduced matrix `V₀ᴴB₁W₀Σ₀⁻¹` are mapped back through
/// the moment scaling; eigenvectors are the leading block rows of `V₀S`.
pub fn extract<P: EigenProblem + ?Sized>(
    hp: &HankelPair,
    moms: &MomentSet,
    contour: &Contour,
    opts: &ExtractOptions,
    problem: &P,
) -> Result<Extraction, ExtractError> {
    let dec = svd(&hp.b0)?;
    let s1 = dec.sigma.first().copied().unwrap_or(0.0);
    let floor = opts.noise_floor.max(RANK_FLOOR);
    if s1 <= floor {
        return Err(ExtractError::RankZero(s1));
    }
    let rank = dec
        .sigma
        .iter()
        .filter(|&&s| s > opts.tol_rank * s1 && s > floor)
        .count();
    let sigma_gap = match dec.sigma.get(rank) {
        Some(&next) if next > 0.0 => dec.sigma[rank - 1] / next,
        _ => f64::INFINITY,
    };
    let v0 = dec.u.submatrix(0, 0, dec.u.rows(), rank);
    let w0 = dec.v.submatrix(0, 0, dec.v.rows(), rank);
    let inv_sigma: Vec<C64> = dec.sigma[..rank].iter().map(|&s| C64::new(1.0 / s, 0.0)).collect();
    let reduced = v0
        .adjoint()
        .matmul(&hp.b1)
        .matmul(&w0)
        .matmul(&CMatrix::from_diag(&inv_sigma));
    let eig = eig_dense(&reduced)?;
    let vecs = v0.matmul(&eig.vectors);
    let p = hp.block_rows;
    let mut pairs = Vec::new();
    let mut dropped_outside = 0;
    for (k, &w) in eig.values.iter().enumerate() {
        let z = moms.unscale(w);
        let raw: Vec<C64> = (0..p).map(|i| vecs[(i, k)]).collect();
        let x = normalize_eigenvector(&raw).ok_or(ExtractError::ZeroVector)?;
        let inside = contour.contains(z);
        if !inside && !opts.keep_outside {
            dropped_outside += 1;
            continue;
        }
        let x = if x.len() == problem.dim() {
            x
        } else {
            x[..problem.dim()].to_vec()
        };
        let residual = residual(problem, &x, z)?;
        let flags = if inside { Vec::new() } else { vec![PairFlag::Outside] };
        pairs.push(Eigenpair {
            z,
            x,
            residual,
            inside,
            sigma_gap,
            flags,
        });
    }
    Ok(Extraction {
        pairs,
        rank,
        singular_values: dec.sigma.clone(),
        rank_saturated: rank == dec.sigma.len(),
        dropped_outside,
    })
}

/// Newton refinement of `(x, z)` on `{T(x, z)·x = 0, x_k = 1}`.
///
/// Never fails: on divergence the input is returned with
/// [`PairFlag::RefineFailed`].
pub fn refine_eigenpair<P: EigenProblem + ?Sized>(problem: &P, pair: &Eigenpair, tol: f64) -> Eigenpair {
    let failed = || {
        let mut out = pair.clone();
        out.flags.push(PairFlag::RefineFailed);
        out
    };
    let Some(x) = normalize_eigenvector(&pair.x) else {
        return failed();
    };
    let k = x.iter().position(|v| *v == C64::new(1.0, 0.0)).unwrap_or(0);
    let system = problem.unshifted_system();
    let nv = system.nvars();
    let mut y0 = problem.lift(&x, pair.z);
    y0.push(pair.z);
    let eval = |y: &[C64]| {
        let z = y[nv];
        let e = system.eval_fused(&y[..nv], z);
        let mut f = e.f;
        f.push(y[k] - 1.0);
        let mut jac = CMatrix::zeros(nv + 1, nv + 1);
        jac.set_block(0, 0, &e.jac);
        for (i, v) in e.fz.iter().enumerate() {
            jac[(i, nv)] = *v;
        }
        jac[(nv, k)] = C64::new(1.0, 0.0);
        (f, jac)
    };
    let Ok(sol) = correct(eval, &y0, tol, 30, false) else {
        return failed();
    };
    let z = sol.x[nv];
    let Some(x) = normalize_eigenvector(&sol.x[..problem.dim()]) else {
        return failed();
    };
    let Ok(res) = residual(problem, &x, z) else {
        return failed();
    };
    if !res.is_finite() || !z.is_finite() {
        return failed();
    }
    let mut flags = pair.flags.clone();
    flags.push(PairFlag::Refined);
    if (z - pair.z).norm() > 10.0 * pair.residual.sqrt() {
        flags.push(PairFlag::Unstable);
    }
    Eigenpair {
        z,
        x,
        residual: res,
        inside: pair.inside,
        sigma_gap: pair.sigma_gap,
        flags,
    }
}
