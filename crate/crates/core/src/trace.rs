//! Trace vectors along the contour, the sampled matrix `U(φ(t_ℓ))`, and
//! trapezoidal moments.

use crate::contour::NodeGrid;
use crate::linalg::CMatrix;
use crate::poly::{assemble_pepv, PolyError, PolyMatrixT, ShiftVector, SquareSystem};
use crate::prelude::*;
use crate::tracker::{continue_node, solve_start, PathStatus, SolutionSet, StartStats, TrackError, TrackOptions};

pub use crate::poly::make_shifts;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum TraceError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("start solve failed: {0}")]
    Start(TrackError),
    #[error("tracking failed at node {node}: {source}")]
    Track { node: usize, source: TrackError },
    #[error("path {path} stopped at node {node} ({status:?})")]
    PathLost {
        node: usize,
        path: usize,
        status: PathStatus,
    },
    #[error("no toric solutions at the start node")]
    NoSolutions,
    #[error("sample count does not match the node grid")]
    GridMismatch,
}

/// Trace samples of one shift column.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceColumn {
    pub shift_index: usize,
    /// Trace vector at each node `ℓ = 0..N−1`.
    pub values: Vec<Vec<C64>>,
    /// Trace vector after the full loop, at `t = 2π`.
    pub closure: Vec<C64>,
    pub path_count: usize,
    pub start_stats: StartStats,
    pub count_mismatch: Option<(usize, usize)>,
    /// Path-id pairs flagged as jumped, with the node where it happened.
    pub collisions: Vec<(usize, usize, usize)>,
    /// `(node, path)` pairs where the caller's degeneracy check fired.
    pub degenerate: Vec<(usize, usize)>,
    pub start_set: SolutionSet,
    pub end_set: SolutionSet,
}

/// Tracking knobs shared by all columns.
#[derive(Clone, Copy, Debug)]
pub struct ColumnSetup<'a> {
    pub grid: &'a NodeGrid,
    pub opts: &'a TrackOptions,
    pub seed: u64,
    pub expected: Option<usize>,
    /// Number of leading coordinates summed into the trace.
    pub trace_dims: usize,
}

fn sum_points(set: &SolutionSet, dims: usize) -> Vec<C64> {
    let mut acc = vec![C64::new(0.0, 0.0); dims];
    for p in &set.points {
        for (a, v) in acc.iter_mut().zip(p) {
            *a += v;
        }
    }
    acc
}

/// Tracks every toric solution of `system` once around the contour and
/// records the coordinate sums at each node.
///
/// `degenerate` flags points that must not be trusted (their nodes are
/// recorded, tracking continues).
pub fn evaluate_system_column(
    system: &SquareSystem,
    shift_index: usize,
    setup: &ColumnSetup<'_>,
    degenerate: Option<&dyn Fn(&[C64]) -> bool>,
) -> Result<TraceColumn, TraceError> {
    let grid = setup.grid;
    let start = solve_start(system, grid, 0, setup.seed, setup.expected, setup.opts).map_err(TraceError::Start)?;
    if start.set.is_empty() {
        return Err(TraceError::NoSolutions);
    }
    let mut flagged = Vec::new();
    let mut check = |node: usize, set: &SolutionSet| {
        if let Some(f) = degenerate {
            for (p, &id) in set.points.iter().zip(&set.path_ids) {
                if f(p) {
                    flagged.push((node, id));
                }
            }
        }
    };
    check(0, &start.set);
    let mut values = Vec::with_capacity(grid.len());
    values.push(sum_points(&start.set, setup.trace_dims));
    let mut collisions = Vec::new();
    let mut set = start.set.clone();
    for node in 1..=grid.len() {
        set =
            continue_node(system, &set, grid, node, setup.opts).map_err(|source| TraceError::Track { node, source })?;
        if let Some((path, status)) = set.first_failure() {
            return Err(TraceError::PathLost { node, path, status });
        }
        collisions.extend(set.collisions.iter().map(|&(a, b)| (node, a, b)));
        if node < grid.len() {
            check(node, &set);
            values.push(sum_points(&set, setup.trace_dims));
        }
    }
    Ok(TraceColumn {
        shift_index,
        closure: sum_points(&set, setup.trace_dims),
        values,
        path_count: start.set.len(),
        start_stats: start.stats,
        count_mismatch: start.count_mismatch,
        collisions,
        degenerate: flagged,
        start_set: start.set,
        end_set: set,
    })
}

/// One column of `U`: assembles `T·x − a` and traces it around the grid.
pub fn evaluate_column(
    t: &PolyMatrixT,
    a: &ShiftVector,
    shift_index: usize,
    setup: &ColumnSetup<'_>,
) -> Result<TraceColumn, TraceError> {
    let system = assemble_pepv(t, a)?;
    evaluate_system_column(&system, shift_index, setup, None)
}

/// Node samples of `U(φ(t_ℓ))`.
#[derive(Clone, Debug, PartialEq)]
pub struct USamples {
    pub matrices: Vec<CMatrix>,
}

impl USamples {
    /// Stacks trace columns side by side; all columns must share the node count.
    pub fn from_columns(columns: &[TraceColumn]) -> Result<Self, TraceError> {
        let nodes = columns.first().map_or(0, |c| c.values.len());
        if columns.iter().any(|c| c.values.len() != nodes) {
            return Err(TraceError::GridMismatch);
        }
        let rows = columns.first().map_or(0, |c| c.closure.len());
        let matrices = (0..nodes)
            .map(|l| CMatrix::from_fn(rows, columns.len(), |i, j| columns[j].values[l][i]))
            .collect();
        Ok(USamples { matrices })
    }

    /// Samples a known matrix function at the grid nodes.
    pub fn from_fn(grid: &NodeGrid, f: impl Fn(C64) -> CMatrix) -> Self {
        USamples {
            matrices: grid.nodes.iter().map(|nd| f(nd.z)).collect(),
        }
    }
}

/// Trapezoidal moments `A_k = (1/(iN))·Σ_ℓ U(φ_ℓ)·φ′_ℓ·w_ℓ^k` with
/// `w = (z − center)/scale`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSet {
    pub matrices: Vec<CMatrix>,
    pub nodes: usize,
    pub blocks: usize,
    pub center: C64,
    pub scale: f64,
    /// Largest entry modulus over all samples `U(z_ℓ)`.
    pub sample_scale: f64,
}

impl MomentSet {
    /// Maps an eigenvalue of the scaled variable back to `z`.
    pub fn unscale(&self, w: C64) -> C64 {
        self.center + w * self.scale
    }
}

fn moments_in(u: &USamples, grid: &NodeGrid, m: usize, center: C64, scale: f64) -> Result<MomentSet, TraceError> {
    if u.matrices.len() != grid.len() || m == 0 {
        return Err(TraceError::GridMismatch);
    }
    let (rows, cols) = u.matrices.first().map_or((0, 0), |a| (a.rows(), a.cols()));
    let mut out = vec![CMatrix::zeros(rows, cols); 2 * m];
    for (ul, nd) in u.matrices.iter().zip(&grid.nodes) {
        let w = (nd.z - center) / scale;
        let mut weight = nd.dz;
        for a in out.iter_mut() {
            a.axpy(weight, ul);
            weight *= w;
        }
    }
    let factor = C64::new(0.0, -1.0 / grid.len() as f64);
    Ok(MomentSet {
        matrices: out.into_iter().map(|a| a.scale(factor)).collect(),
        nodes: grid.len(),
        blocks: m,
        center,
        scale,
        sample_scale: u.matrices.iter().map(|a| a.norm_max()).fold(0.0, f64::max),
    })
}

/// Plain moments in `z`: `A_0 … A_{2M−1}`.
pub fn moments(u: &USamples, grid: &NodeGrid, m: usize) -> Result<MomentSet, TraceError> {
    moments_in(u, grid, m, C64::new(0.0, 0.0), 1.0)
}

/// Moments in the contour-centered variable `w = (z − c)/s`, `s` the
/// larger radius; keeps `w^k` of order one on the contour.
pub fn scaled_moments(u: &USamples, grid: &NodeGrid, m: usize) -> Result<MomentSet, TraceError> {
    let c = &grid.contour;
    moments_in(u, grid, m, c.center, c.scale())
}
