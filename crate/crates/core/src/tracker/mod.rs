//! Path tracking for the shifted systems: a total-degree start solve at the
//! first contour node and predictor-corrector continuation between nodes.

pub(crate) mod newton;
mod start;

pub use start::{solve_start, solve_start_at, StartSolve, StartStats};

use crate::contour::NodeGrid;
use crate::linalg::{norm2, Lu};
use crate::poly::SquareSystem;
use crate::prelude::*;
use newton::correct;

/// Consecutive accepted substeps before the step size doubles.
const GROWTH_AFTER: usize = 5;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum TrackError {
    #[error("invalid tracking options: {0}")]
    InvalidOptions(&'static str),
    #[error("StartSystemDegenerate: {failed} of {total} start paths could not be started")]
    StartSystemDegenerate { failed: usize, total: usize },
    #[error("TooManyPaths: the total-degree homotopy would track {0} paths")]
    TooManyPaths(u128),
    #[error("node index {got} does not follow node {have}")]
    NodeOutOfOrder { have: usize, got: usize },
    #[error("SingularJacobian")]
    SingularJacobian,
    #[error("NoConvergence: Newton stopped at residual {residual:e}")]
    NoConvergence { residual: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackOptions {
    pub newton_tol: f64,
    pub newton_maxit: usize,
    pub max_substeps: usize,
    pub divergence_norm: f64,
    pub min_step: f64,
    pub jump_tol: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions {
            newton_tol: 1e-12,
            newton_maxit: 6,
            max_substeps: 1 << 14,
            divergence_norm: 1e8,
            min_step: 1e-10,
            jump_tol: 1e-8,
        }
    }
}

impl TrackOptions {
    pub fn validate(&self) -> Result<(), TrackError> {
        let positive = [self.newton_tol, self.divergence_norm, self.min_step, self.jump_tol];
        if positive.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(TrackError::InvalidOptions("tolerances must be positive and finite"));
        }
        if self.newton_maxit < 2 {
            return Err(TrackError::InvalidOptions("newton_maxit must be at least 2"));
        }
        if self.max_substeps == 0 {
            return Err(TrackError::InvalidOptions("max_substeps must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathStatus {
    Tracked,
    /// `‖x‖` exceeded the divergence bound.
    Diverged,
    /// The step size fell below `min_step`.
    StepUnderflow,
    /// The substep budget for one node interval ran out.
    SubstepLimit,
    /// The path collided with another one and re-tracking did not separate them.
    Jumped,
}

impl PathStatus {
    /// Whether the path still carries a usable point.
    pub fn is_alive(self) -> bool {
        matches!(self, PathStatus::Tracked | PathStatus::Jumped)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathDiagnostics {
    /// Substeps taken in the most recent node interval.
    pub substeps: usize,
    /// Total substeps since the start node.
    pub total_substeps: usize,
    /// `‖F(x, z)‖` at the current node.
    pub residual: f64,
    pub status: PathStatus,
    /// Preferred parameter step carried into the next interval.
    pub step: f64,
}

/// The tracked solutions of one shifted system at one contour node.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionSet {
    pub points: Vec<Vec<C64>>,
    pub path_ids: Vec<usize>,
    pub node_index: usize,
    pub diagnostics: Vec<PathDiagnostics>,
    /// Path-id pairs that ended a node interval on top of each other.
    pub collisions: Vec<(usize, usize)>,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index and status of the first path that is no longer usable.
    pub fn first_failure(&self) -> Option<(usize, PathStatus)> {
        self.diagnostics
            .iter()
            .zip(&self.path_ids)
            .find(|(d, _)| !d.status.is_alive())
            .map(|(d, &id)| (id, d.status))
    }
}

/// Newton's method on `F(·, z) = 0` from `x`.
pub fn newton_refine(s: &SquareSystem, x: &[C64], z: C64, tol: f64, maxit: usize) -> Result<Vec<C64>, TrackError> {
    let eval = |y: &[C64]| {
        let e = s.eval_fused(y, z);
        (e.f, e.jac)
    };
    match correct(eval, x, tol, maxit, false) {
        Ok(c) => Ok(c.x),
        Err(newton::Failure::Singular) => Err(TrackError::SingularJacobian),
        Err(newton::Failure::MaxIterations(r)) => Err(TrackError::NoConvergence { residual: r }),
        Err(_) => Err(TrackError::NoConvergence {
            residual: f64::INFINITY,
        }),
    }
}

struct Segment {
    x: Vec<C64>,
    substeps: usize,
    status: PathStatus,
    step: f64,
}

struct SegmentLimits {
    max_substeps: usize,
    max_step: f64,
}

/// Continues one path from `t0` to `t1` along the contour.
fn track_segment(
    s: &SquareSystem,
    grid: &NodeGrid,
    x0: &[C64],
    (t0, t1): (f64, f64),
    first_step: f64,
    opts: &TrackOptions,
    limits: &SegmentLimits,
) -> Segment {
    let c = &grid.contour;
    let span = t1 - t0;
    let mut x = x0.to_vec();
    let mut t = t0;
    let mut h = first_step.min(limits.max_step);
    let mut streak = 0;
    let mut substeps = 0;
    let done = |status, x, substeps, step| Segment {
        x,
        substeps,
        status,
        step,
    };
    while t < t1 {
        if substeps >= limits.max_substeps {
            return done(PathStatus::SubstepLimit, x, substeps, h);
        }
        substeps += 1;
        let target = if t + h >= t1 - 1e-12 * span { t1 } else { t + h };
        let dt = target - t;

        let ev = s.eval_fused(&x, c.phi(t));
        let predicted = Lu::new(&ev.jac).ok().map(|lu| {
            let v = lu.solve_vec(&ev.fz);
            let factor = c.dphi(t) * dt;
            x.iter().zip(&v).map(|(xi, vi)| xi - vi * factor).collect::<Vec<_>>()
        });
        let z_target = c.phi(target);
        let corrected = predicted.and_then(|xp| {
            let eval = |y: &[C64]| {
                let e = s.eval_fused(y, z_target);
                (e.f, e.jac)
            };
            correct(eval, &xp, opts.newton_tol, opts.newton_maxit, true).ok()
        });
        match corrected {
            Some(cr) => {
                x = cr.x;
                t = target;
                if norm2(&x) > opts.divergence_norm {
                    return done(PathStatus::Diverged, x, substeps, h);
                }
                streak += 1;
                if streak >= GROWTH_AFTER {
                    h = (2.0 * h).min(limits.max_step);
                    streak = 0;
                }
            }
            None => {
                h *= 0.5;
                streak = 0;
                if h < opts.min_step {
                    return done(PathStatus::StepUnderflow, x, substeps, h);
                }
            }
        }
    }
    done(PathStatus::Tracked, x, substeps, h)
}

fn collided(a: &[C64], b: &[C64], tol: f64) -> bool {
    let d: f64 = a.iter().zip(b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
    d <= tol * (1.0 + norm2(a).max(norm2(b)))
}

fn find_collisions(points: &[Vec<C64>], alive: &[bool], tol: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if alive[i] && alive[j] && collided(&points[i], &points[j], tol) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Advances every live path of `sols` from node `to_node − 1` to `to_node`.
///
/// `to_node == N` closes the loop back at `t = 2π`. Paths that collide are
/// re-tracked once with a finer step and a larger substep budget; if they
/// still coincide both are marked [`PathStatus::Jumped`].
pub fn continue_node(
    s: &SquareSystem,
    sols: &SolutionSet,
    grid: &NodeGrid,
    to_node: usize,
    opts: &TrackOptions,
) -> Result<SolutionSet, TrackError> {
    opts.validate()?;
    if to_node == 0 || sols.node_index + 1 != to_node || to_node > grid.len() {
        return Err(TrackError::NodeOutOfOrder {
            have: sols.node_index,
            got: to_node,
        });
    }
    let span = (grid.t(to_node - 1), grid.t(to_node));
    let dt = span.1 - span.0;
    let normal = SegmentLimits {
        max_substeps: opts.max_substeps,
        max_step: dt,
    };
    let mut out = sols.clone();
    out.node_index = to_node;
    out.collisions.clear();
    let advance = |k: usize, first_step: f64, limits: &SegmentLimits, out: &mut SolutionSet| {
        let seg = track_segment(s, grid, &sols.points[k], span, first_step, opts, limits);
        let diag = &mut out.diagnostics[k];
        diag.substeps = seg.substeps;
        diag.total_substeps = sols.diagnostics[k].total_substeps + seg.substeps;
        diag.status = if seg.status == PathStatus::Tracked && sols.diagnostics[k].status == PathStatus::Jumped {
            PathStatus::Jumped
        } else {
            seg.status
        };
        diag.step = seg.step;
        diag.residual = norm2(&s.evaluate(&seg.x, grid.contour.phi(span.1)));
        out.points[k] = seg.x;
    };

    for k in 0..sols.len() {
        if sols.diagnostics[k].status.is_alive() {
            advance(k, sols.diagnostics[k].step.min(dt), &normal, &mut out);
        }
    }

    let alive: Vec<bool> = out.diagnostics.iter().map(|d| d.status.is_alive()).collect();
    let hits = find_collisions(&out.points, &alive, opts.jump_tol);
    if !hits.is_empty() {
        let fine = SegmentLimits {
            max_substeps: opts.max_substeps.saturating_mul(4),
            max_step: dt / 16.0,
        };
        let mut redo: Vec<usize> = hits.iter().flat_map(|&(a, b)| [a, b]).collect();
        redo.sort_unstable();
        redo.dedup();
        for &k in &redo {
            advance(k, dt / 64.0, &fine, &mut out);
        }
        let alive: Vec<bool> = out.diagnostics.iter().map(|d| d.status.is_alive()).collect();
        for (a, b) in find_collisions(&out.points, &alive, opts.jump_tol) {
            out.diagnostics[a].status = PathStatus::Jumped;
            out.diagnostics[b].status = PathStatus::Jumped;
            out.collisions.push((out.path_ids[a], out.path_ids[b]));
        }
    }
    Ok(out)
}
