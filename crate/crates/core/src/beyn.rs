//! Classical Beyn method for problems `T(z)·x = 0` without eigenvector
//! dependence, with moments from LU solves against a random probe.

use crate::contour::{make_grid, Contour};
use crate::exec::{map_indexed, Stopwatch};
use crate::linalg::{CMatrix, Lu};
use crate::poly::PolyMatrixT;
use crate::prelude::*;
use crate::rng::{complex_normal, stream, Stream};
use crate::solver::{finish, SolveConfig, SolveError, SolveReport};
use crate::trace::{scaled_moments, USamples};

/// Random `n × q` probe matrix with complex normal entries.
pub fn probe_matrix(n: usize, q: usize, seed: u64) -> CMatrix {
    let mut rng = stream(seed, Stream::BeynProbe);
    CMatrix::from_fn(n, q, |_, _| complex_normal(&mut rng))
}

/// Samples `T(φ(t_ℓ))⁻¹·V̂` at every node.
pub fn beyn_samples(t: &PolyMatrixT, grid: &crate::contour::NodeGrid, probe: &CMatrix) -> Result<USamples, SolveError> {
    let x = vec![C64::new(1.0, 0.0); t.n()];
    let solved = map_indexed(grid.len(), |l| {
        let tz = t.eval_matrix(&x, grid.nodes[l].z);
        Lu::new(&tz).map(|lu| lu.solve(probe))
    });
    let mut matrices = Vec::with_capacity(solved.len());
    for (node, r) in solved.into_iter().enumerate() {
        matrices.push(r.map_err(|source| SolveError::SingularNode { node, source })?);
    }
    Ok(USamples { matrices })
}

/// Eigenpairs of `T(z)` inside `contour`. `q` is the probe width and
/// defaults to `n`.
pub fn beyn_solve(
    t: &PolyMatrixT,
    contour: &Contour,
    cfg: &SolveConfig,
    q: Option<usize>,
) -> Result<SolveReport, SolveError> {
    cfg.validate()?;
    if t.row_degrees().iter().any(|&d| d != 0) {
        return Err(SolveError::Config("classical Beyn needs all row degrees zero"));
    }
    let n = t.n();
    let q = q.unwrap_or(n);
    if q == 0 || q > n {
        return Err(SolveError::Config("probe width must lie in 1..=n"));
    }
    let grid = make_grid(contour, cfg.nodes)?;
    let clock = Stopwatch::start();
    let probe = probe_matrix(n, q, cfg.seed);
    let u = beyn_samples(t, &grid, &probe)?;
    let solves = clock.seconds();
    let clock = Stopwatch::start();
    let moms = scaled_moments(&u, &grid, cfg.moments).map_err(|source| SolveError::Trace { column: 0, source })?;
    let moments_time = clock.seconds();
    let mut report = finish(t, contour, cfg, &moms, Vec::new())?;
    report.timings.tracking = solves;
    report.timings.moments = moments_time;
    Ok(report)
}
