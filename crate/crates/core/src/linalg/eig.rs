use super::{CMatrix, LinalgError};
use crate::prelude::*;

/// Iterations on a single eigenvalue before an exceptional shift.
const EXCEPTIONAL_EVERY: usize = 10;
/// Iterations on a single eigenvalue before giving up.
const MAX_ITER_PER_VALUE: usize = 300;

/// Complex Schur form `A = Z·T·Zᴴ` with `T` upper triangular and `Z` unitary.
#[derive(Clone, Debug)]
pub struct Schur {
    pub t: CMatrix,
    pub z: CMatrix,
}

/// Eigenvalues and unit-norm right eigenvectors (stored as columns).
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    pub vectors: CMatrix,
}

fn cabs1(z: C64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Reduces `a` to upper Hessenberg form by Householder reflections.
/// Returns `(H, Q)` with `A = Q·H·Qᴴ`.
fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = super::norm2(&x);
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = super::norm2(&v);
        if vnorm == 0.0 {
            continue;
        }
        for vi in v.iter_mut() {
            *vi /= vnorm;
        }
        // H <- (I - 2vvᴴ) H
        for j in 0..n {
            let w: C64 = v.iter().enumerate().map(|(r, vr)| vr.conj() * h[(k + 1 + r, j)]).sum();
            for (r, vr) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= 2.0 * vr * w;
            }
        }
        // H <- H (I - 2vvᴴ), Q <- Q (I - 2vvᴴ)
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let w: C64 = v.iter().enumerate().map(|(r, vr)| m[(i, k + 1 + r)] * vr).sum();
                for (r, vr) in v.iter().enumerate() {
                    m[(i, k + 1 + r)] -= 2.0 * w * vr.conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    (h, q)
}

/// Rotation `G = [[c, s], [-s̄, c]]` with `G·[x, y]ᵀ = [r, 0]ᵀ`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let rho = ax.hypot(ay);
    (ax / rho, (x / ax) * y.conj() / rho)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let p = (a - d) * 0.5;
    let bc = b * c;
    let mut disc = (p * p + bc).sqrt();
    if (p - disc).norm() > (p + disc).norm() {
        disc = -disc;
    }
    let denom = p + disc;
    if denom.norm() == 0.0 {
        d
    } else {
        d - bc / denom
    }
}

/// Complex Schur decomposition by Hessenberg reduction and single-shift QR.
pub fn schur(a: &CMatrix) -> Result<Schur, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::DimensionMismatch("Schur form needs a square matrix"));
    }
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let n = a.rows();
    let (mut h, mut z) = hessenberg(a);
    if n < 2 {
        return Ok(Schur { t: h, z });
    }
    let ulp = f64::EPSILON;
    let smallnum = f64::MIN_POSITIVE * (n as f64 / ulp);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let sub = cabs1(h[(lo, lo - 1)]);
            if sub <= smallnum {
                break;
            }
            let mut scale = cabs1(h[(lo - 1, lo - 1)]) + cabs1(h[(lo, lo)]);
            if scale == 0.0 {
                scale = h.norm_max();
            }
            if sub <= ulp * scale {
                break;
            }
            lo -= 1;
        }
        if lo > 0 {
            h[(lo, lo - 1)] = C64::new(0.0, 0.0);
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if iter > MAX_ITER_PER_VALUE {
            return Err(LinalgError::NoConvergence {
                iterations: total,
                converged: n - 1 - hi,
                total: n,
            });
        }
        let shift = if iter.is_multiple_of(EXCEPTIONAL_EVERY) {
            let kick = 0.75 * cabs1(h[(hi, hi - 1)]);
            let angle = (total as f64) * 2.399_963_229_728_653;
            h[(hi, hi)] + C64::from_polar(kick, angle)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        let mut x = h[(lo, lo)] - shift;
        let mut y = h[(lo + 1, lo)];
        for k in lo..hi {
            let (c, s) = givens(x, y);
            let sc = s.conj();
            let cstart = if k > lo { k - 1 } else { lo };
            for j in cstart..n {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = -sc * a + b * c;
            }
            let rend = (k + 2).min(hi);
            for i in 0..=rend {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * sc;
                h[(i, k + 1)] = -a * s + b * c;
            }
            for i in 0..n {
                let a = z[(i, k)];
                let b = z[(i, k + 1)];
                z[(i, k)] = a * c + b * sc;
                z[(i, k + 1)] = -a * s + b * c;
            }
            if k > lo {
                h[(k + 1, k - 1)] = C64::new(0.0, 0.0);
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok(Schur { t: h, z })
}

/// Eigenvalues and eigenvectors of a square matrix.
///
/// Eigenvectors come from back substitution on the triangular Schur factor
/// and are returned with unit Euclidean norm.
pub fn eig_dense(a: &CMatrix) -> Result<EigenDecomposition, LinalgError> {
    let Schur { t, z } = schur(a)?;
    let n = t.rows();
    let values: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let tnorm = t.norm_max().max(f64::MIN_POSITIVE);
    let smin = (f64::EPSILON * tnorm).max(f64::MIN_POSITIVE * 1e3);
    let mut vectors = CMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = values[k];
        let mut y = vec![C64::new(0.0, 0.0); k + 1];
        y[k] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = t[(i, k)];
            for j in i + 1..k {
                acc += t[(i, j)] * y[j];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < smin {
                d = C64::new(smin, 0.0);
            }
            y[i] = -acc / d;
        }
        let mut v: Vec<C64> = (0..n).map(|r| (0..=k).map(|j| z[(r, j)] * y[j]).sum()).collect();
        let nrm = super::norm2(&v);
        if nrm > 0.0 {
            for vi in v.iter_mut() {
                *vi /= nrm;
            }
        }
        vectors.set_column(k, &v);
    }
    Ok(EigenDecomposition { values, vectors })
}
