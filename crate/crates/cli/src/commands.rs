use std::path::{Path, PathBuf};
use std::time::Instant;

use contrace::beyn::beyn_solve;
use contrace::counts::{dense_counts, pyramid_count, repv_count, CountReport};
use contrace::linalg::poly_roots;
use contrace::repv::solve_repv;
use contrace::solver::{SolveError, SolveWarning};
use contrace::{solve, SolveReport};
use serde::Serialize;

use crate::args::{CountArgs, FamilyArg, ReplayArgs, RootsArgs, RunArgs};
use crate::config::RunConfig;
use crate::output::{summary_table, write_run, RunManifest, EIGENPAIRS_FILE};
use crate::problem::{parse_coefficients, parse_pepv, parse_repv, read_text};
use crate::CliError;

/// Subcommands that produce eigenpairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunKind {
    Solve,
    Beyn,
    Repv,
}

impl RunKind {
    pub fn name(self) -> &'static str {
        match self {
            RunKind::Solve => "solve",
            RunKind::Beyn => "beyn",
            RunKind::Repv => "repv",
        }
    }

    fn parse(name: &str) -> Option<Self> {
        [RunKind::Solve, RunKind::Beyn, RunKind::Repv]
            .into_iter()
            .find(|k| k.name() == name)
    }
}

fn solve_error(e: SolveError) -> CliError {
    match e {
        SolveError::Config(_) | SolveError::Poly(_) | SolveError::Contour(_) => CliError::Validation(e.to_string()),
        SolveError::Trace { .. } | SolveError::SingularNode { .. } | SolveError::Extract(_) => {
            CliError::Numerical(e.to_string())
        }
    }
}

fn configure_threads(threads: usize) {
    // The global pool can only be built once per process; later calls keep it.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
}

/// Runs one eigenpair computation and writes its outputs.
pub fn execute(
    kind: RunKind,
    problem: &Path,
    cfg: &RunConfig,
    out_dir: &Path,
) -> Result<(SolveReport, RunManifest), CliError> {
    configure_threads(cfg.threads);
    let text = read_text(problem)?;
    let contour = cfg.contour.contour()?;
    let solve_cfg = cfg.solve_config();
    let clock = Instant::now();
    let report = match kind {
        RunKind::Solve => solve(&parse_pepv(problem, &text)?, &contour, &solve_cfg),
        RunKind::Beyn => beyn_solve(&parse_pepv(problem, &text)?, &contour, &solve_cfg, cfg.probe_width),
        RunKind::Repv => solve_repv(&parse_repv(problem, &text)?, &contour, &solve_cfg),
    }
    .map_err(solve_error)?;
    let manifest = write_run(
        kind.name(),
        problem,
        &text,
        cfg,
        &report,
        clock.elapsed().as_secs_f64(),
        out_dir,
    )?;
    Ok((report, manifest))
}

pub fn cmd_run(kind: RunKind, args: &RunArgs, probe_width: Option<usize>) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(args, probe_width)?;
    let (report, _) = execute(kind, &args.problem, &cfg, &args.out_dir)?;
    print!("{}", summary_table(kind.name(), &cfg, &report, &args.out_dir));
    if report
        .warnings
        .iter()
        .any(|w| matches!(w, SolveWarning::CountMismatch { .. }))
    {
        eprintln!("hint: a start node near a discriminant point loses solutions; rotate the contour phase with --contour-rotation");
    }
    Ok(())
}

#[derive(Serialize)]
struct CountJson {
    family: &'static str,
    n: u64,
    d: Option<u64>,
    e: Option<u64>,
    m: Option<u64>,
    delta: u128,
    total_paths: u128,
    total_eigs: Option<u128>,
}

impl From<CountReport> for CountJson {
    fn from(r: CountReport) -> Self {
        CountJson {
            family: r.family.name(),
            n: r.n,
            d: r.d,
            e: r.e,
            m: r.m,
            delta: r.delta,
            total_paths: r.total_paths,
            total_eigs: r.total_eigs,
        }
    }
}

pub fn count_report(args: &CountArgs) -> Result<CountReport, CliError> {
    let need = |v: Option<u64>, flag: &str| v.ok_or_else(|| CliError::Validation(format!("family needs -{flag}")));
    let report = match args.family {
        FamilyArg::Dense => dense_counts(args.n, need(args.d, "d")?, need(args.e, "e")?),
        FamilyArg::Pyramid => pyramid_count(args.n, need(args.d, "d")?, args.e),
        FamilyArg::Repv => repv_count(args.n, need(args.m, "m")?),
    };
    report.map_err(|e| CliError::Validation(e.to_string()))
}

pub fn cmd_count(args: &CountArgs) -> Result<(), CliError> {
    let report = count_report(args)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&CountJson::from(report)).expect("count serializes")
    );
    Ok(())
}

pub fn roots_csv(path: &Path) -> Result<String, CliError> {
    let coeffs = parse_coefficients(path, &read_text(path)?)?;
    let mut roots = poly_roots(&coeffs).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut out = String::from("re,im\n");
    for r in roots {
        out.push_str(&format!("{:e},{:e}\n", r.re, r.im));
    }
    Ok(out)
}

pub fn cmd_roots(args: &RootsArgs) -> Result<(), CliError> {
    print!("{}", roots_csv(&args.file)?);
    Ok(())
}

/// Outcome of a replay: the recorded and replayed result digests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replay {
    pub recorded: String,
    pub replayed: String,
    pub out_dir: PathBuf,
}

impl Replay {
    pub fn identical(&self) -> bool {
        self.recorded == self.replayed
    }
}

pub fn replay(manifest_path: &Path, out_dir: Option<&Path>) -> Result<Replay, CliError> {
    let manifest = RunManifest::load(manifest_path)?;
    let kind = RunKind::parse(&manifest.command)
        .ok_or_else(|| CliError::Validation(format!("unknown command `{}` in manifest", manifest.command)))?;
    let text = read_text(&manifest.input)?;
    if crate::output::sha256_hex(text.as_bytes()) != manifest.input_sha256 {
        return Err(CliError::Validation(format!(
            "{}: input changed since the manifest was written",
            manifest.input.display()
        )));
    }
    let out_dir = match out_dir {
        Some(d) => d.to_path_buf(),
        None => manifest_path.parent().unwrap_or(Path::new(".")).join("replay"),
    };
    let (_, replayed) = execute(kind, &manifest.input, &manifest.config, &out_dir)?;
    debug_assert!(replayed.outputs.eigenpairs.ends_with(EIGENPAIRS_FILE));
    Ok(Replay {
        recorded: manifest.outputs.eigenpairs_sha256,
        replayed: replayed.outputs.eigenpairs_sha256,
        out_dir,
    })
}

pub fn cmd_replay(args: &ReplayArgs) -> Result<(), CliError> {
    let r = replay(&args.manifest, args.out_dir.as_deref())?;
    if r.identical() {
        println!("replay identical: {} ({})", r.out_dir.display(), r.replayed);
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "replay differs: recorded {} but replayed {} in {}",
            r.recorded,
            r.replayed,
            r.out_dir.display()
        )))
    }
}
