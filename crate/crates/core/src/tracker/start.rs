//! Total-degree start solve in projective coordinates.
//!
//! Each row `F_i` of total degree `D_i` is homogenized with an extra
//! coordinate `X_0` and deformed from `X_i^{D_i} − X_0^{D_i}` by
//! `H_i = γ(1 − s)(X_i^{D_i} − X_0^{D_i}) + s·F_i^h(X)`, with a random affine
//! chart `cᵀX = 1` closing the system. Paths heading to infinity stay
//! bounded in the chart and are recognized by `X_0 → 0` at `s = 1`.

use super::newton::{correct, Failure};
use super::{PathDiagnostics, PathStatus, SolutionSet, TrackError, TrackOptions};
use crate::contour::NodeGrid;
use crate::linalg::{norm2, CMatrix, Lu};
use crate::poly::SquareSystem;
use crate::prelude::*;
use crate::rng::{complex_normal, derive_seed, stream, unit_complex, Stream};
use core::f64::consts::TAU;

const MAX_PATHS: u128 = 1 << 20;
const MAX_ATTEMPTS: usize = 5;
const S_STEP_MAX: f64 = 0.1;
const S_STEP_INIT: f64 = 0.02;
const S_STEP_MIN: f64 = 1e-12;
const S_MAX_STEPS: usize = 50_000;
/// Relative size of `X_0` below which an endpoint lies at infinity.
const INFINITY_TOL: f64 = 1e-8;
/// Toric filter: coordinates this small relative to `‖x‖_∞` count as zero.
const TORIC_TOL: f64 = 1e-8;
/// Relative distance under which two endpoints are the same solution.
const DEDUP_TOL: f64 = 1e-6;
/// Largest accepted row residual relative to the row's term magnitudes.
const BACKWARD_TOL: f64 = 1e-8;

/// Bookkeeping for a start solve.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StartStats {
    /// Paths per homotopy attempt, `Π D_i`.
    pub bezout: u128,
    pub attempts: usize,
    pub paths_tracked: usize,
    pub at_infinity: usize,
    pub non_toric: usize,
    pub failed: usize,
    pub duplicates: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StartSolve {
    pub set: SolutionSet,
    pub stats: StartStats,
    /// `(expected, retained)` when a caller-supplied count was not met.
    pub count_mismatch: Option<(usize, usize)>,
}

struct HomRow {
    degree: u32,
    terms: Vec<(Vec<u32>, C64)>,
}

struct Homotopy {
    rows: Vec<HomRow>,
    gamma: C64,
    chart: Vec<C64>,
    max_power: usize,
}

struct HomEval {
    h: Vec<C64>,
    hx: CMatrix,
    hs: Vec<C64>,
}

impl Homotopy {
    fn dim(&self) -> usize {
        self.chart.len()
    }

    fn eval(&self, x: &[C64], s: f64) -> HomEval {
        let nv = self.dim();
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let pw: Vec<Vec<C64>> = x
            .iter()
            .map(|&xi| {
                let mut p = vec![one; self.max_power + 1];
                for k in 1..=self.max_power {
                    p[k] = p[k - 1] * xi;
                }
                p
            })
            .collect();
        let mut h = vec![zero; nv];
        let mut hs = vec![zero; nv];
        let mut hx = CMatrix::zeros(nv, nv);
        let mut prefix = vec![zero; nv + 1];
        let mut suffix = vec![zero; nv + 1];
        let a = self.gamma * (1.0 - s);
        for (i, row) in self.rows.iter().enumerate() {
            let mut f = zero;
            let mut grad = vec![zero; nv];
            for (e, c) in &row.terms {
                prefix[0] = one;
                for k in 0..nv {
                    prefix[k + 1] = prefix[k] * pw[k][e[k] as usize];
                }
                suffix[nv] = one;
                for k in (0..nv).rev() {
                    suffix[k] = suffix[k + 1] * pw[k][e[k] as usize];
                }
                f += c * prefix[nv];
                for k in 0..nv {
                    if e[k] > 0 {
                        grad[k] += c * (e[k] as f64) * pw[k][e[k] as usize - 1] * prefix[k] * suffix[k + 1];
                    }
                }
            }
            let d = row.degree as usize;
            let g = pw[i + 1][d] - pw[0][d];
            h[i] = a * g + f * s;
            hs[i] = f - self.gamma * g;
            for k in 0..nv {
                hx[(i, k)] = grad[k] * s;
            }
            hx[(i, i + 1)] += a * (d as f64) * pw[i + 1][d - 1];
            hx[(i, 0)] -= a * (d as f64) * pw[0][d - 1];
        }
        let last = nv - 1;
        h[last] = self.chart.iter().zip(x).map(|(c, xi)| c * xi).sum::<C64>() - one;
        for k in 0..nv {
            hx[(last, k)] = self.chart[k];
        }
        HomEval { h, hx, hs }
    }

    /// `dX/ds = −H_X⁻¹·H_s`.
    fn velocity(&self, x: &[C64], s: f64) -> Option<Vec<C64>> {
        let e = self.eval(x, s);
        let lu = Lu::new(&e.hx).ok()?;
        Some(lu.solve_vec(&e.hs).into_iter().map(|v| -v).collect())
    }

    fn correct_at(&self, x: &[C64], s: f64, opts: &TrackOptions, guard: bool) -> Result<Vec<C64>, Failure> {
        let eval = |y: &[C64]| {
            let e = self.eval(y, s);
            (e.h, e.hx)
        };
        correct(eval, x, opts.newton_tol, opts.newton_maxit, guard).map(|c| c.x)
    }
}

fn axpy(x: &[C64], a: C64, v: &[C64]) -> Vec<C64> {
    x.iter().zip(v).map(|(xi, vi)| xi + a * vi).collect()
}

enum PathEnd {
    Finished(Vec<C64>),
    Stalled(Vec<C64>, f64),
    Singular,
}

/// Tracks `s: 0 → 1` with an RK4 predictor and a guarded Newton corrector.
fn track_s(hom: &Homotopy, x0: Vec<C64>, opts: &TrackOptions) -> PathEnd {
    let mut x = x0;
    let mut s = 0.0;
    let mut h = S_STEP_INIT;
    let mut streak = 0;
    for _ in 0..S_MAX_STEPS {
        if s >= 1.0 {
            return PathEnd::Finished(x);
        }
        let target = if s + h >= 1.0 - 1e-14 { 1.0 } else { s + h };
        let dt = target - s;
        let predicted = (|| {
            let k1 = hom.velocity(&x, s)?;
            let k2 = hom.velocity(&axpy(&x, C64::new(dt / 2.0, 0.0), &k1), s + dt / 2.0)?;
            let k3 = hom.velocity(&axpy(&x, C64::new(dt / 2.0, 0.0), &k2), s + dt / 2.0)?;
            let k4 = hom.velocity(&axpy(&x, C64::new(dt, 0.0), &k3), target)?;
            Some(
                (0..x.len())
                    .map(|k| x[k] + (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]) * (dt / 6.0))
                    .collect::<Vec<_>>(),
            )
        })();
        if predicted.is_none() && s == 0.0 {
            return PathEnd::Singular;
        }
        match predicted.and_then(|xp| hom.correct_at(&xp, target, opts, true).ok()) {
            Some(xc) => {
                x = xc;
                s = target;
                streak += 1;
                if streak >= super::GROWTH_AFTER {
                    h = (2.0 * h).min(S_STEP_MAX);
                    streak = 0;
                }
            }
            None => {
                h *= 0.5;
                streak = 0;
                if h < S_STEP_MIN {
                    return PathEnd::Stalled(x, s);
                }
            }
        }
    }
    PathEnd::Stalled(x, s)
}

/// Homogenizes `F(·, z)` row by row with `X_0` as the leading coordinate.
fn homogenize(s: &SquareSystem, z: C64) -> Result<Vec<HomRow>, TrackError> {
    let n = s.nvars();
    s.rows()
        .iter()
        .zip(s.row_degrees())
        .map(|(row, &degree)| {
            if degree == 0 {
                return Err(TrackError::StartSystemDegenerate { failed: 1, total: 1 });
            }
            let terms = row
                .terms()
                .iter()
                .map(|t| {
                    let mut e = Vec::with_capacity(n + 1);
                    e.push(degree - t.degree());
                    e.extend_from_slice(&t.exponent);
                    (e, t.coeff.eval(z))
                })
                .filter(|(_, c)| *c != C64::new(0.0, 0.0))
                .collect();
            Ok(HomRow { degree, terms })
        })
        .collect()
}

/// Start points `λ·(1, ω_1, …, ω_n)` with `ω_i` running over `D_i`-th
/// roots of unity, scaled onto the chart.
fn start_points(degrees: &[u32], chart: &[C64]) -> Vec<Vec<C64>> {
    let total: usize = degrees.iter().map(|&d| d as usize).product();
    (0..total)
        .map(|mut idx| {
            let mut p = vec![C64::new(1.0, 0.0)];
            for &d in degrees {
                let k = idx % d as usize;
                idx /= d as usize;
                p.push(C64::from_polar(1.0, TAU * k as f64 / d as f64));
            }
            let lambda: C64 = chart.iter().zip(&p).map(|(c, v)| c * v).sum();
            p.into_iter().map(|v| v / lambda).collect()
        })
        .collect()
}

enum Verdict {
    Keep(Vec<C64>, f64),
    Infinite,
    NonToric,
    Failed,
}

fn classify(s: &SquareSystem, z: C64, end: PathEnd, opts: &TrackOptions) -> Verdict {
    let proj = match end {
        PathEnd::Finished(x) => x,
        PathEnd::Stalled(x, at) if at > 0.9 => x,
        _ => return Verdict::Failed,
    };
    let big = proj.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    if proj[0].norm() <= INFINITY_TOL * big {
        return Verdict::Infinite;
    }
    let affine: Vec<C64> = proj[1..].iter().map(|v| v / proj[0]).collect();
    if norm2(&affine) > opts.divergence_norm {
        return Verdict::Infinite;
    }
    let eval = |y: &[C64]| {
        let e = s.eval_fused(y, z);
        (e.f, e.jac)
    };
    let x = match correct(eval, &affine, opts.newton_tol, opts.newton_maxit + 4, false) {
        Ok(c) => c.x,
        Err(_) => {
            return if is_toric(&affine) {
                Verdict::Failed
            } else {
                Verdict::NonToric
            };
        }
    };
    if !is_toric(&x) {
        return Verdict::NonToric;
    }
    let residual = norm2(&s.evaluate(&x, z));
    if residual > 1e3 * opts.newton_tol * (1.0 + norm2(&x)) {
        return Verdict::Failed;
    }
    // A small residual made of even smaller terms marks a point stalled
    // next to a singular zero (typically the origin), not a toric root.
    if backward_error(s, &x, z) > BACKWARD_TOL {
        return Verdict::NonToric;
    }
    Verdict::Keep(x, residual)
}

/// `max_i |F_i(x)| / Σ_t |c_t(z)·x^{e_t}|`.
fn backward_error(s: &SquareSystem, x: &[C64], z: C64) -> f64 {
    s.rows()
        .iter()
        .map(|row| {
            let mut value = C64::new(0.0, 0.0);
            let mut size = 0.0;
            for t in row.terms() {
                let term = t
                    .exponent
                    .iter()
                    .zip(x)
                    .fold(t.coeff.eval(z), |acc, (&e, &v)| acc * v.powu(e));
                value += term;
                size += term.norm();
            }
            if size > 0.0 {
                value.norm() / size
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

fn is_toric(x: &[C64]) -> bool {
    let big = x.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    big > TORIC_TOL && x.iter().all(|v| v.norm() > TORIC_TOL * big)
}

fn same_point(a: &[C64], b: &[C64]) -> bool {
    let d: f64 = a.iter().zip(b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
    d <= DEDUP_TOL * (1.0 + norm2(a))
}

/// Solves `F(x, z) = 0` for all toric solutions at a fixed `z`.
///
/// Attempts with fresh `γ` and chart are repeated until one adds nothing
/// new (or the expected count is reached); endpoints are merged across
/// attempts.
pub fn solve_start_at(
    s: &SquareSystem,
    z: C64,
    seed: u64,
    expected: Option<usize>,
    opts: &TrackOptions,
) -> Result<(Vec<Vec<C64>>, Vec<f64>, StartStats), TrackError> {
    opts.validate()?;
    let rows = homogenize(s, z)?;
    let degrees: Vec<u32> = rows.iter().map(|r| r.degree).collect();
    let bezout = s.bezout_number();
    if bezout > MAX_PATHS {
        return Err(TrackError::TooManyPaths(bezout));
    }
    let max_power = rows
        .iter()
        .flat_map(|r| r.terms.iter().flat_map(|(e, _)| e.iter().copied()))
        .chain(degrees.iter().copied())
        .max()
        .unwrap_or(1) as usize;
    let mut stats = StartStats {
        bezout,
        ..StartStats::default()
    };
    let mut found: Vec<Vec<C64>> = Vec::new();
    let mut residuals: Vec<f64> = Vec::new();
    let nv = s.nvars() + 1;
    let mut rows = Some(rows);
    let mut hom: Option<Homotopy> = None;
    for attempt in 0..MAX_ATTEMPTS {
        let attempt_seed = derive_seed(seed, attempt as u64);
        let gamma = unit_complex(&mut stream(attempt_seed, Stream::StartGamma));
        let mut chart_rng = stream(attempt_seed, Stream::Chart);
        let chart: Vec<C64> = (0..nv).map(|_| complex_normal(&mut chart_rng)).collect();
        let h = match hom.take() {
            Some(prev) => Homotopy { gamma, chart, ..prev },
            None => Homotopy {
                rows: rows.take().expect("rows moved once"),
                gamma,
                chart,
                max_power,
            },
        };
        let starts = start_points(&degrees, &h.chart);
        let total = starts.len();
        let mut singular = 0;
        let mut added = 0;
        stats.attempts += 1;
        for x0 in starts {
            stats.paths_tracked += 1;
            let end = track_s(&h, x0, opts);
            if matches!(end, PathEnd::Singular) {
                singular += 1;
            }
            match classify(s, z, end, opts) {
                Verdict::Keep(x, r) => {
                    if found.iter().any(|y| same_point(y, &x)) {
                        stats.duplicates += 1;
                    } else {
                        found.push(x);
                        residuals.push(r);
                        added += 1;
                    }
                }
                Verdict::Infinite => stats.at_infinity += 1,
                Verdict::NonToric => stats.non_toric += 1,
                Verdict::Failed => stats.failed += 1,
            }
        }
        if singular * 100 > total {
            return Err(TrackError::StartSystemDegenerate {
                failed: singular,
                total,
            });
        }
        hom = Some(h);
        let done = match expected {
            Some(e) => found.len() >= e,
            None => attempt > 0 && added == 0,
        };
        if done {
            break;
        }
    }
    Ok((found, residuals, stats))
}

/// Solves the shifted system at contour node `node` and packages the
/// toric solutions as the starting [`SolutionSet`].
pub fn solve_start(
    s: &SquareSystem,
    grid: &NodeGrid,
    node: usize,
    seed: u64,
    expected: Option<usize>,
    opts: &TrackOptions,
) -> Result<StartSolve, TrackError> {
    let z = grid.contour.phi(grid.t(node));
    let (points, residuals, stats) = solve_start_at(s, z, seed, expected, opts)?;
    let step = grid.t(1) - grid.t(0);
    let diagnostics = residuals
        .iter()
        .map(|&residual| PathDiagnostics {
            substeps: 0,
            total_substeps: 0,
            residual,
            status: PathStatus::Tracked,
            step,
        })
        .collect();
    let count_mismatch = expected.filter(|&e| e != points.len()).map(|e| (e, points.len()));
    Ok(StartSolve {
        set: SolutionSet {
            path_ids: (0..points.len()).collect(),
            points,
            node_index: node,
            diagnostics,
            collisions: Vec::new(),
        },
        stats,
        count_mismatch,
    })
}
