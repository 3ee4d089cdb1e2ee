//! End-to-end driver: shifts, column tracking, moments, extraction,
//! refinement and filtering.

use crate::contour::{make_grid, Contour, ContourError};
use crate::counts;
use crate::exec::{map_indexed, Stopwatch};
use crate::extraction::{
    extract, hankel_pair, refine_eigenpair, EigenProblem, Eigenpair, ExtractError, ExtractOptions, PairFlag,
};
use crate::poly::{assemble_pepv, make_shifts, PolyError, PolyMatrixT, ShiftStyle, ShiftVector, SquareSystem};
use crate::prelude::*;
use crate::trace::{evaluate_system_column, scaled_moments, ColumnSetup, MomentSet, TraceColumn, TraceError, USamples};
use crate::tracker::{StartStats, TrackOptions};

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveConfig {
    /// Quadrature nodes `N`.
    pub nodes: usize,
    /// Hankel blocks `M`; `2M` moments are formed.
    pub moments: usize,
    pub seed: u64,
    pub shift_style: ShiftStyle,
    pub tol_rank: f64,
    /// Pairs with a larger residual are dropped; `None` keeps everything.
    pub residual_threshold: Option<f64>,
    pub keep_outside: bool,
    pub refine: bool,
    /// Newton tolerance used by refinement.
    pub refine_tol: f64,
    /// Solutions per column the caller expects; overrides the formula check.
    pub expected_delta: Option<usize>,
    pub track: TrackOptions,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            nodes: 200,
            moments: 2,
            seed: DEFAULT_SEED,
            shift_style: ShiftStyle::Dense,
            tol_rank: 1e-8,
            residual_threshold: Some(1e-6),
            keep_outside: false,
            refine: false,
            refine_tol: 1e-14,
            expected_delta: None,
            track: TrackOptions::default(),
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        if self.nodes < 4 {
            return Err(SolveError::Contour(ContourError::TooFewNodes(self.nodes)));
        }
        if self.moments == 0 {
            return Err(SolveError::Config("moments must be at least 1"));
        }
        if !(self.tol_rank > 0.0 && self.tol_rank < 1.0) {
            return Err(SolveError::Config("rank tolerance must lie in (0, 1)"));
        }
        self.track
            .validate()
            .map_err(|_| SolveError::Config("invalid tracking options"))
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("configuration: {0}")]
    Config(&'static str),
    #[error("problem: {0}")]
    Poly(#[from] PolyError),
    #[error("contour: {0}")]
    Contour(#[from] ContourError),
    #[error("column {column}: {source}")]
    Trace { column: usize, source: TraceError },
    #[error("node {node}: {source}")]
    SingularNode {
        node: usize,
        source: crate::linalg::LinalgError,
    },
    #[error("extraction: {0}")]
    Extract(#[from] ExtractError),
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveWarning {
    /// The start solve of a column retained a different number of solutions.
    CountMismatch {
        column: usize,
        expected: usize,
        found: usize,
    },
    /// Columns retained different numbers of solutions.
    UnequalColumns { counts: Vec<usize> },
    /// The numerical rank filled the Hankel pencil; `M` may be too small.
    RankSaturated { rank: usize },
    /// No singular value above the floor: nothing inside the contour.
    RankZero { sigma_max: f64 },
    /// Two paths could not be separated by re-tracking.
    PathsCollided {
        column: usize,
        node: usize,
        paths: (usize, usize),
    },
    /// A lifted path came close to a zero denominator at `nodes` nodes,
    /// first at `first_node`.
    DenominatorDegenerate {
        column: usize,
        path: usize,
        first_node: usize,
        nodes: usize,
    },
    /// Refinement moved the eigenvalue by more than `10·√residual`.
    Unstable { z: C64 },
    /// Pairs dropped by the residual filter.
    ResidualFiltered { count: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColumnSummary {
    pub shift_index: usize,
    pub path_count: usize,
    pub start_stats: StartStats,
    pub total_substeps: usize,
    pub max_substeps: usize,
    /// Largest `‖closure − start‖` of the trace vector over the loop.
    pub closure_gap: f64,
}

impl ColumnSummary {
    fn from_column(c: &TraceColumn) -> Self {
        let gap = c
            .values
            .first()
            .map(|v0| crate::linalg::norm2(&v0.iter().zip(&c.closure).map(|(a, b)| a - b).collect::<Vec<_>>()))
            .unwrap_or(0.0);
        ColumnSummary {
            shift_index: c.shift_index,
            path_count: c.path_count,
            start_stats: c.start_stats.clone(),
            total_substeps: c.end_set.diagnostics.iter().map(|d| d.total_substeps).sum(),
            max_substeps: c
                .end_set
                .diagnostics
                .iter()
                .map(|d| d.total_substeps)
                .max()
                .unwrap_or(0),
            closure_gap: gap,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhaseTimings {
    pub tracking: f64,
    pub moments: f64,
    pub extraction: f64,
    pub refinement: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub eigenpairs: Vec<Eigenpair>,
    pub columns: Vec<ColumnSummary>,
    /// Frobenius norms of `A_0 … A_{2M−1}` (in the scaled variable).
    pub moment_norms: Vec<f64>,
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub expected_delta: Option<usize>,
    pub timings: PhaseTimings,
    pub warnings: Vec<SolveWarning>,
    pub config: SolveConfig,
    pub contour: Contour,
}

/// Solutions per column predicted by the closed-form counts, when their
/// hypotheses are visibly satisfied: equal row degrees and every pure power
/// `x_j^{d+1}` present in every row.
pub fn predicted_delta(t: &PolyMatrixT, style: ShiftStyle) -> Option<usize> {
    if !t.has_dense_pure_powers() {
        return None;
    }
    let n = t.n() as u64;
    let d = t.row_degrees()[0] as u64;
    let report = match style {
        ShiftStyle::Dense => counts::dense_counts(n, d, t.z_degree() as u64).ok()?,
        ShiftStyle::Monomial => counts::pyramid_count(n, d, None).ok()?,
    };
    usize::try_from(report.delta).ok()
}

/// What a pipeline run needs besides the configuration.
pub(crate) struct Columns<'a> {
    pub systems: Vec<SquareSystem>,
    pub trace_dims: usize,
    pub expected: Option<usize>,
    pub degenerate: Option<&'a (dyn Fn(&[C64]) -> bool + Sync)>,
}

/// Runs the trace pipeline for already assembled column systems.
pub(crate) fn run_columns<P: EigenProblem + ?Sized>(
    problem: &P,
    contour: &Contour,
    cfg: &SolveConfig,
    cols: Columns<'_>,
) -> Result<SolveReport, SolveError> {
    cfg.validate()?;
    let grid = make_grid(contour, cfg.nodes)?;
    let clock = Stopwatch::start();
    let setup_for = |j: usize| ColumnSetup {
        grid: &grid,
        opts: &cfg.track,
        seed: crate::rng::derive_seed(cfg.seed ^ 0x5741_5254, j as u64),
        expected: cols.expected,
        trace_dims: cols.trace_dims,
    };
    let results = map_indexed(cols.systems.len(), |j| {
        let setup = setup_for(j);
        let watch = cols.degenerate.map(|f| f as &dyn Fn(&[C64]) -> bool);
        evaluate_system_column(&cols.systems[j], j, &setup, watch)
    });
    let mut columns = Vec::with_capacity(results.len());
    for (j, r) in results.into_iter().enumerate() {
        columns.push(r.map_err(|source| SolveError::Trace { column: j, source })?);
    }
    let tracking = clock.seconds();

    let mut warnings = Vec::new();
    for c in &columns {
        if let Some((expected, found)) = c.count_mismatch {
            warnings.push(SolveWarning::CountMismatch {
                column: c.shift_index,
                expected,
                found,
            });
        }
        for &(node, a, b) in &c.collisions {
            warnings.push(SolveWarning::PathsCollided {
                column: c.shift_index,
                node,
                paths: (a, b),
            });
        }
        let mut flagged: Vec<(usize, usize, usize)> = Vec::new();
        for &(node, path) in &c.degenerate {
            match flagged.iter_mut().find(|f| f.0 == path) {
                Some(f) => f.2 += 1,
                None => flagged.push((path, node, 1)),
            }
        }
        warnings.extend(
            flagged
                .into_iter()
                .map(|(path, first_node, nodes)| SolveWarning::DenominatorDegenerate {
                    column: c.shift_index,
                    path,
                    first_node,
                    nodes,
                }),
        );
    }
    let path_counts: Vec<usize> = columns.iter().map(|c| c.path_count).collect();
    if path_counts.windows(2).any(|w| w[0] != w[1]) {
        warnings.push(SolveWarning::UnequalColumns { counts: path_counts });
    }

    let clock = Stopwatch::start();
    let u = USamples::from_columns(&columns).map_err(|source| SolveError::Trace { column: 0, source })?;
    let moms = scaled_moments(&u, &grid, cfg.moments).map_err(|source| SolveError::Trace { column: 0, source })?;
    let moments_time = clock.seconds();

    let mut report = finish(problem, contour, cfg, &moms, warnings)?;
    report.columns = columns.iter().map(ColumnSummary::from_column).collect();
    report.expected_delta = cols.expected;
    report.timings.tracking = tracking;
    report.timings.moments = moments_time;
    Ok(report)
}

/// Extraction, refinement and filtering shared by all front ends.
pub(crate) fn finish<P: EigenProblem + ?Sized>(
    problem: &P,
    contour: &Contour,
    cfg: &SolveConfig,
    moms: &MomentSet,
    mut warnings: Vec<SolveWarning>,
) -> Result<SolveReport, SolveError> {
    let clock = Stopwatch::start();
    let hp = hankel_pair(moms)?;
    let opts = ExtractOptions {
        tol_rank: cfg.tol_rank,
        keep_outside: cfg.keep_outside,
        // Samples carry the corrector's relative error; moments below that
        // level cannot be told apart from an empty contour.
        noise_floor: cfg.track.newton_tol * moms.sample_scale,
    };
    let moment_norms = moms.matrices.iter().map(|a| a.norm_fro()).collect();
    let mut report = SolveReport {
        eigenpairs: Vec::new(),
        columns: Vec::new(),
        moment_norms,
        singular_values: Vec::new(),
        rank: 0,
        expected_delta: None,
        timings: PhaseTimings::default(),
        warnings: Vec::new(),
        config: *cfg,
        contour: *contour,
    };
    let ex = match extract(&hp, moms, contour, &opts, problem) {
        Ok(ex) => ex,
        Err(ExtractError::RankZero(s)) => {
            warnings.push(SolveWarning::RankZero { sigma_max: s });
            report.warnings = warnings;
            report.timings.extraction = clock.seconds();
            return Ok(report);
        }
        Err(e) => return Err(e.into()),
    };
    if ex.rank_saturated {
        warnings.push(SolveWarning::RankSaturated { rank: ex.rank });
    }
    report.timings.extraction = clock.seconds();

    let clock = Stopwatch::start();
    let mut pairs = ex.pairs;
    if cfg.refine {
        pairs = pairs
            .iter()
            .map(|p| refine_eigenpair(problem, p, cfg.refine_tol))
            .collect();
        for p in &pairs {
            if p.has(PairFlag::Unstable) {
                warnings.push(SolveWarning::Unstable { z: p.z });
            }
        }
    }
    report.timings.refinement = clock.seconds();

    if let Some(threshold) = cfg.residual_threshold {
        let mut filtered = 0;
        pairs.retain_mut(|p| {
            if p.residual <= threshold {
                return true;
            }
            if cfg.keep_outside {
                p.flags.push(PairFlag::AboveThreshold);
                return true;
            }
            filtered += 1;
            false
        });
        if filtered > 0 {
            warnings.push(SolveWarning::ResidualFiltered { count: filtered });
        }
    }
    pairs.sort_by(|a, b| {
        use core::cmp::Ordering::Equal;
        b.inside
            .cmp(&a.inside)
            .then(a.z.re.partial_cmp(&b.z.re).unwrap_or(Equal))
            .then(a.z.im.partial_cmp(&b.z.im).unwrap_or(Equal))
    });
    report.eigenpairs = pairs;
    report.singular_values = ex.singular_values;
    report.rank = ex.rank;
    report.warnings = warnings;
    Ok(report)
}

/// The shifted systems `T·x − a^{(j)}` for the given shifts.
pub fn column_systems(t: &PolyMatrixT, shifts: &[ShiftVector]) -> Result<Vec<SquareSystem>, PolyError> {
    shifts.iter().map(|a| assemble_pepv(t, a)).collect()
}

/// Computes the eigenpairs of `T(x, z)·x = 0` with eigenvalue inside `contour`.
pub fn solve(t: &PolyMatrixT, contour: &Contour, cfg: &SolveConfig) -> Result<SolveReport, SolveError> {
    cfg.validate()?;
    let shifts = make_shifts(t, cfg.shift_style, cfg.seed)?;
    solve_with_shifts(t, contour, cfg, &shifts)
}

/// Like [`solve`], with caller-supplied shift vectors (one per column).
pub fn solve_with_shifts(
    t: &PolyMatrixT,
    contour: &Contour,
    cfg: &SolveConfig,
    shifts: &[ShiftVector],
) -> Result<SolveReport, SolveError> {
    if shifts.len() != t.n() {
        return Err(SolveError::Config("need one shift vector per column"));
    }
    let systems = column_systems(t, shifts)?;
    let expected = cfg.expected_delta.or_else(|| predicted_delta(t, cfg.shift_style));
    run_columns(
        t,
        contour,
        cfg,
        Columns {
            systems,
            trace_dims: t.n(),
            expected,
            degenerate: None,
        },
    )
}
