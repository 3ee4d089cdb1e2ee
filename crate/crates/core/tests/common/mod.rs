//! Problem builders shared by the integration tests.
#![allow(dead_code)]

use contrace::poly::monomials;
use contrace::rng::{complex_normal, stream, Stream};
use contrace::{CMatrix, PolyMatrixT, XPoly, XTerm, ZPoly, C64};

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Linear form `Σ p_k(z)·x_k` from `(k, ascending z-coefficients)` pairs.
pub fn lin(n: usize, terms: &[(usize, &[f64])]) -> XPoly {
    let t = terms
        .iter()
        .map(|(k, z)| {
            let mut e = vec![0u32; n];
            e[*k] = 1;
            XTerm::new(e, ZPoly::new(z.iter().map(|&v| c(v)).collect()))
        })
        .collect();
    XPoly::new(n, t).unwrap()
}

/// The 3×3 quadratic-in-z, linear-in-x introductory example.
pub fn example_1_1() -> PolyMatrixT {
    let rows = vec![
        vec![
            lin(3, &[(0, &[1.]), (1, &[0., 1.])]),
            lin(3, &[(1, &[0., 1.]), (2, &[1.])]),
            lin(3, &[(0, &[1.]), (2, &[-1.])]),
        ],
        vec![
            lin(3, &[(0, &[1.]), (1, &[1., 1.])]),
            lin(3, &[(1, &[1., 0., -1.]), (2, &[0., -1.])]),
            lin(3, &[(0, &[1.]), (2, &[1.])]),
        ],
        vec![
            lin(3, &[(0, &[1., 1.]), (1, &[1.])]),
            lin(3, &[(1, &[1.]), (2, &[-1.])]),
            lin(3, &[(0, &[0., 1.]), (2, &[1., -1.])]),
        ],
    ];
    PolyMatrixT::new(rows).unwrap()
}

/// Ascending coefficients of the degree-12 resolvent of [`example_1_1`].
pub const EXAMPLE_1_1_R: [f64; 13] = [3., -4., 8., 22., 14., -23., -78., -108., -100., -53., -1., 12., 4.];

/// `T` with every degree-`d` monomial in every entry and complex normal
/// z-coefficients of degree `e`.
pub fn random_pepv(n: usize, d: u32, e: usize, seed: u64) -> PolyMatrixT {
    let mut rng = stream(seed, Stream::Problem);
    let mons = monomials(n, d);
    let rows = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let terms = mons
                        .iter()
                        .map(|m| {
                            XTerm::new(
                                m.clone(),
                                ZPoly::new((0..=e).map(|_| complex_normal(&mut rng)).collect()),
                            )
                        })
                        .collect();
                    XPoly::new(n, terms).unwrap()
                })
                .collect()
        })
        .collect();
    PolyMatrixT::new(rows).unwrap()
}

/// Constant-in-x matrix polynomial `Σ_k z^k·A_k` as a `d = 0` problem.
pub fn matrix_polynomial(coeffs: &[CMatrix]) -> PolyMatrixT {
    let n = coeffs[0].rows();
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let z = ZPoly::new(coeffs.iter().map(|a| a[(i, j)]).collect());
                    if z.is_zero() {
                        XPoly::zero(n)
                    } else {
                        XPoly::new(n, vec![XTerm::new(vec![0; n], z)]).unwrap()
                    }
                })
                .collect()
        })
        .collect();
    PolyMatrixT::new(rows).unwrap()
}

pub fn random_matrix(n: usize, seed: u64) -> CMatrix {
    let mut rng = stream(seed, Stream::Problem);
    CMatrix::from_fn(n, n, |_, _| complex_normal(&mut rng))
}

/// Minimum-cost assignment (Hungarian method with potentials) for a
/// square cost matrix; returns the column assigned to each row.
pub fn assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let (mut u, mut v) = (vec![0.0; n + 1], vec![0.0; n + 1]);
    // p[j]: row matched to column j (1-based, 0 = free).
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let (mut delta, mut j1) = (f64::INFINITY, 0);
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        while j0 != 0 {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        }
    }
    let mut row_to_col = vec![0; n];
    for j in 1..=n {
        row_to_col[p[j] - 1] = j - 1;
    }
    row_to_col
}

/// Distances of the minimum-total-distance matching between `found` and
/// `reference`, listed per reference value. `None` if counts differ.
pub fn match_distances(found: &[C64], reference: &[C64]) -> Option<Vec<f64>> {
    if found.len() != reference.len() {
        return None;
    }
    let cost: Vec<Vec<f64>> = reference
        .iter()
        .map(|r| found.iter().map(|f| (r - f).norm()).collect())
        .collect();
    Some(assignment(&cost).iter().enumerate().map(|(i, &j)| cost[i][j]).collect())
}

pub fn max_distance(found: &[C64], reference: &[C64]) -> f64 {
    match_distances(found, reference).map_or(f64::INFINITY, |d| d.into_iter().fold(0.0, f64::max))
}

/// Largest coordinate gap of the best matching between two point sets.
pub fn point_set_gap(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let dist = |p: &[C64], q: &[C64]| p.iter().zip(q).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let cost: Vec<Vec<f64>> = a.iter().map(|p| b.iter().map(|q| dist(p, q)).collect()).collect();
    assignment(&cost)
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .fold(0.0, f64::max)
}

pub fn random_vector(n: usize, seed: u64) -> Vec<C64> {
    let mut rng = stream(seed, Stream::Problem);
    (0..n).map(|_| complex_normal(&mut rng)).collect()
}

/// `A + zB + Σ_k (r_k·x / s_k·x)·T_k` with complex normal data.
pub fn random_repv(n: usize, m: usize, seed: u64) -> contrace::repv::REPvProblem {
    let s = |k: u64| seed.wrapping_mul(1000).wrapping_add(k);
    contrace::repv::REPvProblem::new(
        random_matrix(n, s(0)),
        random_matrix(n, s(1)),
        (0..m).map(|k| random_matrix(n, s(10 + k as u64))).collect(),
        (0..m).map(|k| random_vector(n, s(20 + k as u64))).collect(),
        (0..m).map(|k| random_vector(n, s(30 + k as u64))).collect(),
    )
    .unwrap()
}

/// `sin` of the angle between two complex vectors (projective distance).
pub fn projective_gap(a: &[C64], b: &[C64]) -> f64 {
    let na: f64 = a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let ip: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let cos = (ip.norm() / (na * nb)).min(1.0);
    (1.0 - cos * cos).max(0.0).sqrt()
}

/// Eigenvalues of the pencil `A + zB` via `eig(−B⁻¹A)`.
pub fn pencil_eigenvalues(a: &CMatrix, b: &CMatrix) -> Vec<C64> {
    let m = contrace::linalg::lu_solve(b, a).unwrap().scale(C64::new(-1.0, 0.0));
    contrace::linalg::eig_dense(&m).unwrap().values
}

/// Radius of the origin-centred circle through the widest relative gap
/// in the moduli of `values` that leaves at least `min_inside` inside,
/// with the ratio across that gap.
pub fn splitting_circle(values: &[C64], min_inside: usize) -> (f64, f64) {
    let mut r: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    r.sort_by(f64::total_cmp);
    r.windows(2)
        .skip(min_inside.saturating_sub(1))
        .map(|w| ((w[0] * w[1]).sqrt(), w[1] / w[0]))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
}

/// REPv with `(x, z)` planted as an eigenpair by correcting `A`.
pub fn planted_repv(n: usize, m: usize, seed: u64, x: &[C64], z: C64) -> contrace::repv::REPvProblem {
    let zero = CMatrix::zeros(n, n);
    let ts: Vec<CMatrix> = (0..m)
        .map(|k| random_matrix(n, seed.wrapping_mul(1000) + 10 + k as u64))
        .collect();
    let rs: Vec<Vec<C64>> = (0..m)
        .map(|k| random_vector(n, seed.wrapping_mul(1000) + 20 + k as u64))
        .collect();
    let ss: Vec<Vec<C64>> = (0..m)
        .map(|k| random_vector(n, seed.wrapping_mul(1000) + 30 + k as u64))
        .collect();
    let b = random_matrix(n, seed.wrapping_mul(1000) + 1);
    let rest = contrace::repv::REPvProblem::new(zero, b.clone(), ts.clone(), rs.clone(), ss.clone()).unwrap();
    let a0 = random_matrix(n, seed.wrapping_mul(1000));
    // A = A0 − (A0·x + rest(x, z)·x)·xᴴ/‖x‖² makes T(x, z)·x vanish.
    let defect: Vec<C64> = a0
        .matvec(x)
        .iter()
        .zip(rest.eval_matrix(x, z).matvec(x))
        .map(|(p, q)| p + q)
        .collect();
    let nx: f64 = x.iter().map(|v| v.norm_sqr()).sum();
    let a = CMatrix::from_fn(n, n, |i, j| a0[(i, j)] - defect[i] * x[j].conj() / nx);
    contrace::repv::REPvProblem::new(a, b, ts, rs, ss).unwrap()
}
