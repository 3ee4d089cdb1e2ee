//! Polynomial matrices `T(x, z)`, shift vectors, and the shifted square
//! systems `T(x, z)·x − a(x)` with their derivatives.
//!
//! Row numbers carried by [`PolyError`] are 1-based.

use crate::linalg::CMatrix;
use crate::prelude::*;
use crate::rng::{derive_seed, stream, unit_complex, Stream};
use core::cmp::Ordering;
use rand::Rng;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("InhomogeneousRow({0}): entries of row {0} have different x-degrees")]
    InhomogeneousRow(usize),
    #[error("DegreeMismatch({0}): shift polynomial of row {0} has the wrong degree")]
    DegreeMismatch(usize),
    #[error("MixedDegrees: monomial shifts need equal row degrees")]
    MixedDegrees,
    #[error("ZeroRow({0}): row {0} of T is identically zero")]
    ZeroRow(usize),
    #[error("ZDegreeExceeded({0}): a coefficient in row {0} exceeds the declared z-degree")]
    ZDegreeExceeded(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
}

/// Polynomial in `z` with ascending coefficients; the zero polynomial is empty.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ZPoly {
    coeffs: Vec<C64>,
}

impl ZPoly {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    pub fn zero() -> Self {
        ZPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reporting 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, z: C64) -> C64 {
        crate::linalg::eval_poly(&self.coeffs, z)
    }

    /// Value and first derivative at `z`.
    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let zero = C64::new(0.0, 0.0);
        self.coeffs
            .iter()
            .rev()
            .fold((zero, zero), |(p, dp), c| (p * z + c, dp * z + p))
    }

    pub fn add(&self, other: &ZPoly) -> ZPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[C64], i: usize| v.get(i).copied().unwrap_or_default();
        ZPoly::new((0..len).map(|i| get(&self.coeffs, i) + get(&other.coeffs, i)).collect())
    }

    pub fn scale(&self, s: C64) -> ZPoly {
        ZPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &ZPoly) -> ZPoly {
        if self.is_zero() || other.is_zero() {
            return ZPoly::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ZPoly::new(out)
    }
}

/// Monomial `coeff(z)·x^exponent`.
#[derive(Clone, Debug, PartialEq)]
pub struct XTerm {
    pub exponent: Vec<u32>,
    pub coeff: ZPoly,
}

impl XTerm {
    pub fn new(exponent: Vec<u32>, coeff: ZPoly) -> Self {
        XTerm { exponent, coeff }
    }

    pub fn degree(&self) -> u32 {
        self.exponent.iter().sum()
    }
}

fn cmp_exponent(a: &[u32], b: &[u32]) -> Ordering {
    a.cmp(b)
}

/// Sparse polynomial in `x` with `ZPoly` coefficients.
///
/// Terms are kept sorted by exponent with duplicates merged and zero
/// coefficients dropped, so evaluation order is deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct XPoly {
    nvars: usize,
    terms: Vec<XTerm>,
}

impl XPoly {
    pub fn new(nvars: usize, mut terms: Vec<XTerm>) -> Result<Self, PolyError> {
        if terms.iter().any(|t| t.exponent.len() != nvars) {
            return Err(PolyError::DimensionMismatch(
                "exponent length differs from variable count",
            ));
        }
        terms.sort_by(|a, b| cmp_exponent(&a.exponent, &b.exponent));
        let mut merged: Vec<XTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.exponent == t.exponent => last.coeff = last.coeff.add(&t.coeff),
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        Ok(XPoly { nvars, terms: merged })
    }

    pub fn zero(nvars: usize) -> Self {
        XPoly {
            nvars,
            terms: Vec::new(),
        }
    }

    /// Single term `c·x^exponent` with a constant coefficient.
    pub fn monomial(exponent: Vec<u32>, c: C64) -> Self {
        let nvars = exponent.len();
        XPoly::new(nvars, vec![XTerm::new(exponent, ZPoly::constant(c))]).expect("consistent length")
    }

    /// The variable `x_k` with unit coefficient.
    pub fn var(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        Self::monomial(e, C64::new(1.0, 0.0))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[XTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Common x-degree of all terms, `None` for mixed degrees or zero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d = self.terms.first()?.degree();
        self.terms.iter().all(|t| t.degree() == d).then_some(d)
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.iter().map(XTerm::degree).max().unwrap_or(0)
    }

    pub fn z_degree(&self) -> usize {
        self.terms.iter().map(|t| t.coeff.degree()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &XPoly) -> XPoly {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        XPoly::new(self.nvars, terms).expect("same variable count")
    }

    pub fn scale(&self, s: C64) -> XPoly {
        let terms = self
            .terms
            .iter()
            .map(|t| XTerm::new(t.exponent.clone(), t.coeff.scale(s)))
            .collect();
        XPoly::new(self.nvars, terms).expect("same variable count")
    }

    pub fn sub(&self, other: &XPoly) -> XPoly {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Product with a polynomial in `x` whose coefficients are constants.
    pub fn mul(&self, other: &XPoly) -> XPoly {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let e = a.exponent.iter().zip(&b.exponent).map(|(p, q)| p + q).collect();
                terms.push(XTerm::new(e, a.coeff.mul(&b.coeff)));
            }
        }
        XPoly::new(self.nvars, terms).expect("same variable count")
    }

    /// Product with `x_k`.
    pub fn mul_var(&self, k: usize) -> XPoly {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut e = t.exponent.clone();
                e[k] += 1;
                XTerm::new(e, t.coeff.clone())
            })
            .collect();
        XPoly {
            nvars: self.nvars,
            terms,
        }
    }

    /// Embeds into a larger variable set, the new variables trailing.
    pub fn extend_vars(&self, nvars: usize) -> XPoly {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut e = t.exponent.clone();
                e.resize(nvars, 0);
                XTerm::new(e, t.coeff.clone())
            })
            .collect();
        XPoly { nvars, terms }
    }

    pub fn eval(&self, x: &[C64], z: C64) -> C64 {
        self.terms
            .iter()
            .map(|t| t.coeff.eval(z) * monomial_value(&t.exponent, x))
            .sum()
    }
}

fn monomial_value(e: &[u32], x: &[C64]) -> C64 {
    e.iter()
        .zip(x)
        .filter(|(p, _)| **p > 0)
        .map(|(p, xi)| xi.powu(*p))
        .product()
}

/// The `n × n` polynomial matrix `T(x, z)`; row `i` is homogeneous of
/// degree `d_i` in `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrixT {
    n: usize,
    row_degrees: Vec<u32>,
    entries: Vec<XPoly>,
    z_degree: usize,
}

impl PolyMatrixT {
    /// Builds `T` from its rows, inferring row degrees and the z-degree.
    pub fn new(rows: Vec<Vec<XPoly>>) -> Result<Self, PolyError> {
        Self::build(rows, None, None)
    }

    /// Builds `T` and checks the declared row degrees and z-degree.
    pub fn with_degrees(rows: Vec<Vec<XPoly>>, row_degrees: &[u32], z_degree: usize) -> Result<Self, PolyError> {
        Self::build(rows, Some(row_degrees), Some(z_degree))
    }

    fn build(rows: Vec<Vec<XPoly>>, declared: Option<&[u32]>, z_cap: Option<usize>) -> Result<Self, PolyError> {
        let n = rows.len();
        if n == 0 {
            return Err(PolyError::DimensionMismatch("T must have at least one row"));
        }
        if declared.is_some_and(|d| d.len() != n) {
            return Err(PolyError::DimensionMismatch("row degree list length"));
        }
        let mut row_degrees = Vec::with_capacity(n);
        let mut entries = Vec::with_capacity(n * n);
        let mut z_degree = 0;
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n || row.iter().any(|p| p.nvars() != n) {
                return Err(PolyError::DimensionMismatch("T must be square in n variables"));
            }
            let mut deg: Option<u32> = declared.map(|d| d[i]);
            for p in row.iter().filter(|p| !p.is_zero()) {
                let d = p.homogeneous_degree().ok_or(PolyError::InhomogeneousRow(i + 1))?;
                match deg {
                    Some(d0) if d0 != d => return Err(PolyError::InhomogeneousRow(i + 1)),
                    _ => deg = Some(d),
                }
                let zd = p.z_degree();
                if z_cap.is_some_and(|cap| zd > cap) {
                    return Err(PolyError::ZDegreeExceeded(i + 1));
                }
                z_degree = z_degree.max(zd);
            }
            if row.iter().all(XPoly::is_zero) {
                return Err(PolyError::ZeroRow(i + 1));
            }
            row_degrees.push(deg.unwrap_or(0));
            entries.extend(row);
        }
        Ok(PolyMatrixT {
            n,
            row_degrees,
            entries,
            z_degree: z_cap.unwrap_or(z_degree),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row_degrees(&self) -> &[u32] {
        &self.row_degrees
    }

    pub fn z_degree(&self) -> usize {
        self.z_degree
    }

    pub fn entry(&self, i: usize, j: usize) -> &XPoly {
        &self.entries[i * self.n + j]
    }

    /// Numeric matrix `T(x, z)`.
    pub fn eval_matrix(&self, x: &[C64], z: C64) -> CMatrix {
        CMatrix::from_fn(self.n, self.n, |i, j| self.entry(i, j).eval(x, z))
    }

    /// `T(x, z)·x`.
    pub fn apply(&self, x: &[C64], z: C64) -> Vec<C64> {
        self.eval_matrix(x, z).matvec(x)
    }

    /// Row polynomials `f_i = Σ_j T_ij·x_j`.
    pub fn row_polys(&self) -> Vec<XPoly> {
        (0..self.n)
            .map(|i| (0..self.n).fold(XPoly::zero(self.n), |acc, j| acc.add(&self.entry(i, j).mul_var(j))))
            .collect()
    }

    /// True when every row has the same degree and every row polynomial
    /// contains every pure power `x_j^{d+1}`.
    pub fn has_dense_pure_powers(&self) -> bool {
        let d = self.row_degrees[0];
        if self.row_degrees.iter().any(|&di| di != d) {
            return false;
        }
        self.row_polys().iter().all(|f| {
            (0..self.n).all(|j| {
                f.terms()
                    .iter()
                    .any(|t| t.exponent[j] == d + 1 && t.exponent.iter().sum::<u32>() == d + 1)
            })
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftStyle {
    /// Every monomial of degree `d_i` with a random unit-modulus coefficient.
    Dense,
    /// One term `c_i·x^β` per row, with `β` shared across the rows.
    Monomial,
}

/// The shift polynomials `a_1..a_n` subtracted from the rows of `T·x`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftVector {
    pub polys: Vec<XPoly>,
    pub style: ShiftStyle,
    pub seed: u64,
}

/// All exponent vectors of total degree `d` in `n` variables, in
/// lexicographically decreasing order.
pub fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=d).rev() {
            prefix.push(k);
            rec(n, d - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, d, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

/// Draws `n` shift vectors for `T`, one per column of `U`, each from a seed
/// derived from `seed` and its column index.
pub fn make_shifts(t: &PolyMatrixT, style: ShiftStyle, seed: u64) -> Result<Vec<ShiftVector>, PolyError> {
    let n = t.n();
    let degrees = t.row_degrees();
    if style == ShiftStyle::Monomial && degrees.iter().any(|&d| d != degrees[0]) {
        return Err(PolyError::MixedDegrees);
    }
    Ok((0..n)
        .map(|j| {
            let col_seed = derive_seed(seed, j as u64);
            let mut rng = stream(col_seed, Stream::Shifts);
            let polys = match style {
                ShiftStyle::Dense => degrees
                    .iter()
                    .map(|&d| {
                        let terms = monomials(n, d)
                            .into_iter()
                            .map(|e| XTerm::new(e, ZPoly::constant(unit_complex(&mut rng))))
                            .collect();
                        XPoly::new(n, terms).expect("consistent length")
                    })
                    .collect(),
                ShiftStyle::Monomial => {
                    let mut beta = vec![0u32; n];
                    for _ in 0..degrees[0] {
                        beta[rng.gen_range(0..n)] += 1;
                    }
                    (0..n)
                        .map(|_| XPoly::monomial(beta.clone(), unit_complex(&mut rng)))
                        .collect()
                }
            };
            ShiftVector {
                polys,
                style,
                seed: col_seed,
            }
        })
        .collect())
}

impl ShiftVector {
    /// The zero shift, which turns the assembled system back into `T·x`.
    pub fn zero(t: &PolyMatrixT) -> Self {
        ShiftVector {
            polys: (0..t.n()).map(|_| XPoly::zero(t.n())).collect(),
            style: ShiftStyle::Dense,
            seed: 0,
        }
    }
}

/// Value, x-Jacobian and z-derivative of a square system at one point.
#[derive(Clone, Debug)]
pub struct SystemEval {
    pub f: Vec<C64>,
    pub jac: CMatrix,
    pub fz: Vec<C64>,
}

/// Square polynomial system `F(x, z) = 0` in `nvars` unknowns.
///
/// Rows need not be homogeneous; `row_degrees` holds each row's total
/// degree in `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareSystem {
    nvars: usize,
    rows: Vec<XPoly>,
    row_degrees: Vec<u32>,
    max_power: u32,
}

impl SquareSystem {
    pub fn from_rows(rows: Vec<XPoly>) -> Result<Self, PolyError> {
        let nvars = rows.len();
        if rows.iter().any(|r| r.nvars() != nvars) {
            return Err(PolyError::DimensionMismatch("system must be square"));
        }
        let row_degrees: Vec<u32> = rows.iter().map(XPoly::max_degree).collect();
        let max_power = rows
            .iter()
            .flat_map(|r| r.terms().iter().flat_map(|t| t.exponent.iter().copied()))
            .max()
            .unwrap_or(0);
        Ok(SquareSystem {
            nvars,
            rows,
            row_degrees,
            max_power,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rows(&self) -> &[XPoly] {
        &self.rows
    }

    pub fn row_degrees(&self) -> &[u32] {
        &self.row_degrees
    }

    /// Total-degree (Bézout) bound on the number of isolated solutions.
    pub fn bezout_number(&self) -> u128 {
        self.row_degrees.iter().map(|&d| d.max(1) as u128).product()
    }

    fn powers(&self, x: &[C64]) -> Vec<Vec<C64>> {
        x.iter()
            .map(|&xi| {
                let mut p = Vec::with_capacity(self.max_power as usize + 1);
                p.push(C64::new(1.0, 0.0));
                for k in 0..self.max_power as usize {
                    p.push(p[k] * xi);
                }
                p
            })
            .collect()
    }

    /// `F(x, z)`.
    pub fn evaluate(&self, x: &[C64], z: C64) -> Vec<C64> {
        assert_eq!(x.len(), self.nvars);
        let pw = self.powers(x);
        self.rows
            .iter()
            .map(|row| {
                row.terms()
                    .iter()
                    .map(|t| {
                        let mono: C64 = t.exponent.iter().enumerate().map(|(k, &e)| pw[k][e as usize]).product();
                        t.coeff.eval(z) * mono
                    })
                    .sum()
            })
            .collect()
    }

    /// `∂F/∂x` at `(x, z)`.
    pub fn jacobian_x(&self, x: &[C64], z: C64) -> CMatrix {
        self.eval_fused(x, z).jac
    }

    /// `∂F/∂z` at `(x, z)`.
    pub fn derivative_z(&self, x: &[C64], z: C64) -> Vec<C64> {
        self.eval_fused(x, z).fz
    }

    /// Value, Jacobian and z-derivative in one pass over the terms.
    pub fn eval_fused(&self, x: &[C64], z: C64) -> SystemEval {
        let n = self.nvars;
        assert_eq!(x.len(), n);
        let pw = self.powers(x);
        let zero = C64::new(0.0, 0.0);
        let mut f = vec![zero; n];
        let mut fz = vec![zero; n];
        let mut jac = CMatrix::zeros(n, n);
        let mut prefix = vec![zero; n + 1];
        let mut suffix = vec![zero; n + 1];
        for (i, row) in self.rows.iter().enumerate() {
            for t in row.terms() {
                let (c, dc) = t.coeff.eval_with_derivative(z);
                prefix[0] = C64::new(1.0, 0.0);
                for k in 0..n {
                    prefix[k + 1] = prefix[k] * pw[k][t.exponent[k] as usize];
                }
                suffix[n] = C64::new(1.0, 0.0);
                for k in (0..n).rev() {
                    suffix[k] = suffix[k + 1] * pw[k][t.exponent[k] as usize];
                }
                let mono = prefix[n];
                f[i] += c * mono;
                fz[i] += dc * mono;
                for k in 0..n {
                    let e = t.exponent[k];
                    if e > 0 {
                        jac[(i, k)] += c * (e as f64) * pw[k][e as usize - 1] * prefix[k] * suffix[k + 1];
                    }
                }
            }
        }
        SystemEval { f, jac, fz }
    }
}

/// Expands `T(x, z)·x − a(x)` row by row.
pub fn assemble_pepv(t: &PolyMatrixT, a: &ShiftVector) -> Result<SquareSystem, PolyError> {
    let n = t.n();
    if a.polys.len() != n {
        return Err(PolyError::DimensionMismatch("shift vector length"));
    }
    let rows = t
        .row_polys()
        .into_iter()
        .zip(&a.polys)
        .enumerate()
        .map(|(i, (f, ai))| {
            if ai.nvars() != n {
                return Err(PolyError::DimensionMismatch("shift variable count"));
            }
            if !ai.is_zero() && ai.homogeneous_degree() != Some(t.row_degrees()[i]) {
                return Err(PolyError::DegreeMismatch(i + 1));
            }
            Ok(f.sub(ai))
        })
        .collect::<Result<Vec<_>, _>>()?;
    SquareSystem::from_rows(rows)
}
