//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use common::{
    c, example_1_1, matrix_polynomial, max_distance, pencil_eigenvalues, planted_repv, point_set_gap, projective_gap,
    random_matrix, random_pepv, random_repv, splitting_circle, EXAMPLE_1_1_R,
};
use contrace::beyn::beyn_solve;
use contrace::contour::make_grid;
use contrace::counts::{dense_counts, pyramid_count, repv_count};
use contrace::extraction::{refine_eigenpair, PairFlag};
use contrace::linalg::poly_roots;
use contrace::poly::{assemble_pepv, make_shifts};
use contrace::repv::solve_repv;
use contrace::solver::{column_systems, predicted_delta, DEFAULT_SEED};
use contrace::trace::{evaluate_system_column, moments, ColumnSetup, TraceColumn, USamples};
use contrace::tracker::{solve_start, solve_start_at};
use contrace::{
    solve, CMatrix, Contour, NodeGrid, PolyMatrixT, ShiftStyle, SolveConfig, SquareSystem, TrackOptions, XPoly, XTerm,
    ZPoly, C64,
};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

type Outcome = (bool, String);

fn criterion_1() -> Outcome {
    let clock = Instant::now();
    let contour = Contour::ellipse(c(0.6), 0.4, 0.3, 0.0).unwrap();
    let cfg = SolveConfig {
        nodes: 200,
        moments: 2,
        refine: true,
        ..SolveConfig::default()
    };
    let report = solve(&example_1_1(), &contour, &cfg).unwrap();
    let secs = clock.elapsed().as_secs_f64();
    if report.eigenpairs.len() != 1 {
        return (
            false,
            format!("{} eigenvalues inside, expected 1", report.eigenpairs.len()),
        );
    }
    let p = &report.eigenpairs[0];
    let dz = (p.z - c(0.5919305292)).norm();
    let x: Vec<C64> = p.x.iter().map(|v| v / p.x[0]).collect();
    let dx = x
        .iter()
        .zip([1.0, -1.9218, -1.9646])
        .map(|(a, b)| (a - c(b)).norm())
        .fold(0.0, f64::max);
    let ok = dz <= 1e-8 && dx <= 1e-3 && p.has(PairFlag::Refined) && p.residual <= 1e-10 && secs <= 10.0;
    (
        ok,
        format!(
            "z = {:.12}, |dz| = {dz:.1e}, eigenvector gap {dx:.1e}, residual {:.1e}, {secs:.2} s",
            p.z.re, p.residual
        ),
    )
}

fn criterion_2() -> Outcome {
    let clock = Instant::now();
    let contour = Contour::circle(c(0.0), 3.0).unwrap();
    let cfg = SolveConfig {
        nodes: 400,
        moments: 4,
        ..SolveConfig::default()
    };
    let report = solve(&example_1_1(), &contour, &cfg).unwrap();
    let secs = clock.elapsed().as_secs_f64();
    let roots = poly_roots(&EXAMPLE_1_1_R.iter().map(|&v| c(v)).collect::<Vec<_>>()).unwrap();
    let zs: Vec<C64> = report.eigenpairs.iter().map(|p| p.z).collect();
    let worst = max_distance(&zs, &roots);
    let ok = zs.len() == 12 && worst <= 1e-6 && secs <= 30.0;
    (
        ok,
        format!(
            "{} eigenvalues, worst matched distance {worst:.1e}, {secs:.2} s",
            zs.len()
        ),
    )
}

fn criterion_3() -> Outcome {
    let t = example_1_1();
    let a = make_shifts(&t, ShiftStyle::Dense, DEFAULT_SEED).unwrap().remove(0);
    let s = assemble_pepv(&t, &a).unwrap();
    let grid = make_grid(&Contour::ellipse(c(0.6), 0.4, 0.3, 0.0).unwrap(), 200).unwrap();
    let start = solve_start(&s, &grid, 0, DEFAULT_SEED, Some(8), &TrackOptions::default()).unwrap();
    let found = start.set.len();
    (
        found == 8,
        format!("{found} toric solutions retained, expected 8 (the origin also solves the system)"),
    )
}

fn criterion_4() -> Outcome {
    let dense = dense_counts(3, 2, 4).unwrap().total_paths;
    let p32 = pyramid_count(3, 2, None).unwrap().total_paths;
    let p10 = pyramid_count(10, 1, Some(5)).unwrap();
    let r = repv_count(10, 2).unwrap();
    let got = (dense, p32, p10.total_paths, p10.total_eigs, r.total_paths, r.total_eigs);
    let ok = got == (57, 27, 5120, Some(25600), 550, Some(220));
    (
        ok,
        format!(
            "dense 57 = {dense}, pyramid 27 = {p32}, pyramid 5120/25600 = {}/{:?}, repv 550/220 = {}/{:?}",
            got.2, got.3, got.4, got.5
        ),
    )
}

fn criterion_5() -> Outcome {
    let grid = make_grid(&Contour::circle(c(0.0), 1.0).unwrap(), 64).unwrap();
    let ident = moments(&USamples::from_fn(&grid, |_| CMatrix::identity(2)), &grid, 2).unwrap();
    let e_ident = ident.matrices.iter().map(|a| a.norm_max()).fold(0.0, f64::max);
    let inv = moments(
        &USamples::from_fn(&grid, |z| CMatrix::identity(2).scale(z.inv())),
        &grid,
        1,
    )
    .unwrap();
    let e_inv = inv.matrices[0].sub(&CMatrix::identity(2)).norm_max();
    let poles = [c(0.2), c(-0.3)];
    let diag = USamples::from_fn(&grid, |z| {
        CMatrix::from_diag(&[(z - poles[0]).inv(), (z - poles[1]).inv()])
    });
    let e_diag = moments(&diag, &grid, 1).unwrap().matrices[1]
        .sub(&CMatrix::from_diag(&poles))
        .norm_max();
    let ok = e_ident <= 1e-14 && e_inv <= 1e-14 && e_diag <= 1e-12;
    (
        ok,
        format!("U = I: {e_ident:.1e}, A_0 of I/z: {e_inv:.1e}, A_1 of diag poles: {e_diag:.1e}"),
    )
}

fn criterion_6() -> Outcome {
    let (a, b) = (random_matrix(5, 21), random_matrix(5, 22));
    let oracle = pencil_eigenvalues(&a, &b);
    let (radius, _) = splitting_circle(&oracle, 2);
    let contour = Contour::circle(c(0.0), radius).unwrap();
    let want: Vec<C64> = oracle.iter().copied().filter(|v| contour.contains(*v)).collect();
    let t = matrix_polynomial(&[a, b]);
    let cfg = SolveConfig {
        nodes: 256,
        moments: 2,
        ..SolveConfig::default()
    };
    let beyn: Vec<C64> = beyn_solve(&t, &contour, &cfg, None)
        .unwrap()
        .eigenpairs
        .iter()
        .map(|p| p.z)
        .collect();
    let traced: Vec<C64> = solve(&t, &contour, &cfg)
        .unwrap()
        .eigenpairs
        .iter()
        .map(|p| p.z)
        .collect();
    let (e_beyn, e_trace) = (max_distance(&beyn, &want), max_distance(&traced, &beyn));
    let ok = !want.is_empty() && e_beyn <= 1e-10 && e_trace <= 1e-8;
    (
        ok,
        format!(
            "{} inside, Beyn vs oracle {e_beyn:.1e}, trace pipeline vs Beyn {e_trace:.1e}",
            want.len()
        ),
    )
}

fn loop_column(s: &SquareSystem, grid: &NodeGrid, expected: Option<usize>, seed: u64) -> TraceColumn {
    let opts = TrackOptions::default();
    let setup = ColumnSetup {
        grid,
        opts: &opts,
        seed,
        expected,
        trace_dims: s.nvars(),
    };
    evaluate_system_column(s, 0, &setup, None).unwrap()
}

fn closure_gaps(col: &TraceColumn) -> (f64, f64, bool) {
    let points = point_set_gap(&col.start_set.points, &col.end_set.points);
    let trace = col
        .closure
        .iter()
        .zip(&col.values[0])
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let permuted = col.start_set.path_ids.iter().zip(&col.start_set.points).any(|(id, a)| {
        let end = col.end_set.path_ids.iter().position(|p| p == id).unwrap();
        point_set_gap(std::slice::from_ref(a), std::slice::from_ref(&col.end_set.points[end])) > 1e-6
    });
    (points, trace, permuted)
}

fn criterion_7() -> Outcome {
    let sqrt_row = XPoly::new(
        1,
        vec![
            XTerm::new(vec![2], ZPoly::constant(c(1.0))),
            XTerm::new(vec![0], ZPoly::new(vec![c(0.0), c(-1.0)])),
        ],
    )
    .unwrap();
    let unit = make_grid(&Contour::circle(c(0.0), 1.0).unwrap(), 200).unwrap();
    let mut cols = vec![loop_column(
        &SquareSystem::from_rows(vec![sqrt_row]).unwrap(),
        &unit,
        Some(2),
        1,
    )];
    for seed in 1..=5u64 {
        let n = if seed % 2 == 1 { 2 } else { 3 };
        let t = random_pepv(n, 1, 2, seed);
        let expected = predicted_delta(&t, ShiftStyle::Dense);
        for s in column_systems(&t, &make_shifts(&t, ShiftStyle::Dense, seed).unwrap()).unwrap() {
            cols.push(loop_column(&s, &unit, expected, seed));
        }
    }
    let (mut points, mut trace, mut permuted) = (0.0f64, 0.0f64, 0);
    for col in &cols {
        let (p, t, perm) = closure_gaps(col);
        points = points.max(p);
        trace = trace.max(t);
        permuted += perm as usize;
    }
    let ok = points <= 1e-8 && trace <= 1e-9 && permuted > 0;
    (
        ok,
        format!(
            "{} loops ({permuted} permuted), endpoint gap {points:.1e}, trace gap {trace:.1e}",
            cols.len()
        ),
    )
}

/// The trigonometric 2×2 test problem with every series cut at `z^12`.
fn trig_series_problem() -> PolyMatrixT {
    let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
    let zero = vec![c(0.0); 13];
    let (mut cos, mut cos_sq, mut sin3) = (zero.clone(), zero.clone(), zero);
    for k in 0..=12u32 {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            cos[k as usize] = c(sign / fact(k));
            if k <= 6 {
                cos_sq[2 * k as usize] = c(sign / fact(k));
            }
        } else {
            sin3[k as usize] = c(sign * 3f64.powi(k as i32) / fact(k));
        }
    }
    let entry = |e: Vec<u32>, z: &[C64], s: C64| {
        XPoly::new(2, vec![XTerm::new(e, ZPoly::new(z.iter().map(|a| a * s).collect()))]).unwrap()
    };
    let rows = vec![
        vec![
            entry(vec![2, 1], &[c(1.0)], c(1.0)),
            entry(vec![2, 1], &cos, C64::new(0.0, -2.0)),
        ],
        vec![entry(vec![0, 2], &cos_sq, c(-1.0)), entry(vec![0, 2], &sin3, c(2.0))],
    ];
    PolyMatrixT::new(rows).unwrap()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    if v.is_empty() {
        f64::NAN
    } else {
        v[v.len() / 2]
    }
}

fn criterion_8() -> Outcome {
    let t = trig_series_problem();
    let contour = Contour::circle(c(0.0), 1.5).unwrap();
    let run = |nodes: usize| {
        let cfg = SolveConfig {
            nodes,
            moments: 8,
            residual_threshold: None,
            ..SolveConfig::default()
        };
        let r = solve(&t, &contour, &cfg).unwrap();
        (
            r.eigenpairs.len(),
            median(r.eigenpairs.iter().map(|p| p.residual).collect()),
        )
    };
    let ((n50, m50), (n150, m150)) = (run(50), run(150));
    let ok = m50 / m150 >= 1e6;
    (
        ok,
        format!("median residual {m50:.1e} ({n50} pairs) at N = 50, {m150:.1e} ({n150} pairs) at N = 150"),
    )
}

fn criterion_9() -> Outcome {
    let x = [c(1.0), C64::new(0.5, -0.3)];
    let z = C64::new(0.3, 0.2);
    let p = planted_repv(2, 1, 5, &x, z);
    let cfg = SolveConfig {
        nodes: 200,
        moments: 2,
        refine: true,
        ..SolveConfig::default()
    };
    let report = solve_repv(&p, &Contour::circle(z, 0.2).unwrap(), &cfg).unwrap();
    let best = report
        .eigenpairs
        .iter()
        .map(|e| ((e.z - z).norm(), projective_gap(&e.x, &x)))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap_or((f64::INFINITY, f64::INFINITY));
    let mut mismatches = 0;
    for n in 1..=3 {
        for m in 0..=2 {
            for seed in 0..5u64 {
                let q = random_repv(n, m, 100 + seed);
                let sys = q.lift(&q.shifts(seed)[0]).unwrap();
                let (found, _, _) =
                    solve_start_at(&sys, C64::new(0.37, 0.21), seed, None, &TrackOptions::default()).unwrap();
                mismatches += (Some(found.len()) != q.predicted_delta()) as usize;
            }
        }
    }
    let ok = best.0 <= 1e-8 && best.1 <= 1e-8 && mismatches == 0;
    (
        ok,
        format!(
            "planted |dz| = {:.1e}, eigenvector gap {:.1e}; count law mismatches {mismatches}/45",
            best.0, best.1
        ),
    )
}

fn criterion_10() -> Outcome {
    let clock = Instant::now();
    let t = random_pepv(4, 1, 3, 7);
    // Locate eigenvalues with a wide pilot, then cut at the widest gap in
    // modulus so no eigenvalue sits in the quadrature's leakage band.
    let pilot = SolveConfig {
        nodes: 200,
        moments: 8,
        residual_threshold: None,
        ..SolveConfig::default()
    };
    let seen = solve(&t, &Contour::circle(c(0.0), 0.6).unwrap(), &pilot).unwrap();
    let mut mods: Vec<f64> = seen.eigenpairs.iter().map(|e| e.z.norm()).collect();
    mods.sort_by(f64::total_cmp);
    let (radius, ratio) = mods
        .windows(2)
        .enumerate()
        .filter(|(k, w)| *k >= 2 && w[1] < 0.5)
        .map(|(_, w)| ((w[0] * w[1]).sqrt(), w[1] / w[0]))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let cfg = SolveConfig {
        nodes: 200,
        moments: 4,
        residual_threshold: None,
        ..SolveConfig::default()
    };
    let report = solve(&t, &Contour::circle(c(0.0), radius).unwrap(), &cfg).unwrap();
    let worst = report.eigenpairs.iter().map(|p| p.residual).fold(0.0, f64::max);
    let moved = report
        .eigenpairs
        .iter()
        .map(|p| {
            let r = refine_eigenpair(&t, p, 1e-14);
            if r.has(PairFlag::Refined) {
                (r.z - p.z).norm()
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max);
    let secs = clock.elapsed().as_secs_f64();
    let count = report.eigenpairs.len();
    let ok = count > 0 && count == report.rank && worst <= 1e-8 && moved <= 1e-6 && secs <= 60.0;
    (
        ok,
        format!(
            "radius {radius:.3} (gap ratio {ratio:.2}): {count} pairs, rank {}, max residual {worst:.1e}, refinement shift {moved:.1e}, {secs:.2} s",
            report.rank
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [fn() -> Outcome; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    let mut failed = 0;
    for (k, run) in criteria.iter().enumerate() {
        let (ok, detail) = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            (false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        failed += !ok as usize;
        println!("criterion {}: {} {detail}", k + 1, if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of 10 passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
