//! Result files, run manifests and the terminal summary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use contrace::extraction::PairFlag;
use contrace::solver::SolveWarning;
use contrace::{Eigenpair, SolveReport, C64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

pub const EIGENPAIRS_FILE: &str = "eigenpairs.json";
pub const EIGENVALUES_FILE: &str = "eigenvalues.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
pub struct PairRecord {
    pub z: [f64; 2],
    pub x: Vec<[f64; 2]>,
    pub residual: f64,
    pub inside: bool,
    pub flags: Vec<String>,
}

impl PairRecord {
    pub fn z(&self) -> C64 {
        C64::new(self.z[0], self.z[1])
    }

    pub fn x(&self) -> Vec<C64> {
        self.x.iter().map(|&[re, im]| C64::new(re, im)).collect()
    }
}

pub fn flag_name(f: PairFlag) -> &'static str {
    match f {
        PairFlag::Refined => "refined",
        PairFlag::RefineFailed => "refine_failed",
        PairFlag::Unstable => "unstable",
        PairFlag::Outside => "outside",
        PairFlag::AboveThreshold => "above_threshold",
    }
}

pub fn record(p: &Eigenpair) -> PairRecord {
    PairRecord {
        z: [p.z.re, p.z.im],
        x: p.x.iter().map(|c| [c.re, c.im]).collect(),
        residual: p.residual,
        inside: p.inside,
        flags: p.flags.iter().map(|&f| flag_name(f).to_string()).collect(),
    }
}

pub fn describe_warning(w: &SolveWarning) -> String {
    match w {
        SolveWarning::CountMismatch {
            column,
            expected,
            found,
        } => {
            format!("CountMismatch: column {column} kept {found} start solutions, expected {expected}")
        }
        SolveWarning::UnequalColumns { counts } => format!("UnequalColumns: solutions per column {counts:?}"),
        SolveWarning::RankSaturated { rank } => {
            format!("RankSaturated: rank {rank} fills the Hankel pencil; increase --moments")
        }
        SolveWarning::RankZero { sigma_max } => {
            format!("RankZero: largest singular value {sigma_max:.3e}; no eigenvalues inside the contour")
        }
        SolveWarning::PathsCollided { column, node, paths } => {
            format!(
                "PathsCollided: column {column} node {node} paths {} and {}",
                paths.0, paths.1
            )
        }
        SolveWarning::DenominatorDegenerate {
            column,
            path,
            first_node,
            nodes,
        } => {
            format!("DenominatorDegenerate: column {column} path {path} near a zero denominator at {nodes} node(s) from node {first_node}")
        }
        SolveWarning::Unstable { z } => format!("Unstable: refinement moved z = {} + {}i", z.re, z.im),
        SolveWarning::ResidualFiltered { count } => {
            format!("ResidualFiltered: {count} pair(s) above the residual threshold")
        }
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn eigenpairs_json(records: &[PairRecord]) -> String {
    let mut text = serde_json::to_string_pretty(records).expect("records serialize");
    text.push('\n');
    text
}

pub fn eigenvalues_csv(records: &[PairRecord]) -> String {
    let mut out = String::from("re,im,residual,inside\n");
    for r in records {
        let _ = writeln!(out, "{:e},{:e},{:e},{}", r.z[0], r.z[1], r.residual, r.inside);
    }
    out
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
pub struct Versions {
    pub contrace: String,
    pub manifest: u32,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq)]
pub struct Timing {
    pub tracking: f64,
    pub moments: f64,
    pub extraction: f64,
    pub refinement: f64,
    pub total: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
pub struct Outputs {
    pub eigenpairs: PathBuf,
    pub eigenvalues: PathBuf,
    pub eigenpairs_sha256: String,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
pub struct RunSummary {
    pub eigenpairs: usize,
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub expected_delta: Option<usize>,
    pub paths_per_column: Vec<usize>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub input: PathBuf,
    pub input_sha256: String,
    pub config: RunConfig,
    pub versions: Versions,
    pub seed: u64,
    pub timing: Timing,
    pub outputs: Outputs,
    pub summary: RunSummary,
    pub warnings: Vec<String>,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = crate::problem::read_text(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}:{}: {e}", path.display(), e.line())))
    }
}

/// Writes the two result files and the manifest into `out_dir`.
pub fn write_run(
    command: &str,
    input: &Path,
    input_text: &str,
    cfg: &RunConfig,
    report: &SolveReport,
    total_seconds: f64,
    out_dir: &Path,
) -> Result<RunManifest, CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Validation(format!("{}: {e}", out_dir.display())))?;
    let records: Vec<PairRecord> = report.eigenpairs.iter().map(record).collect();
    let json = eigenpairs_json(&records);
    let pairs_path = out_dir.join(EIGENPAIRS_FILE);
    let csv_path = out_dir.join(EIGENVALUES_FILE);
    write(&pairs_path, json.as_bytes())?;
    write(&csv_path, eigenvalues_csv(&records).as_bytes())?;
    let manifest = RunManifest {
        command: command.to_string(),
        input: std::fs::canonicalize(input).unwrap_or_else(|_| input.to_path_buf()),
        input_sha256: sha256_hex(input_text.as_bytes()),
        config: cfg.clone(),
        versions: Versions {
            contrace: env!("CARGO_PKG_VERSION").to_string(),
            manifest: MANIFEST_VERSION,
        },
        seed: cfg.seed,
        timing: Timing {
            tracking: report.timings.tracking,
            moments: report.timings.moments,
            extraction: report.timings.extraction,
            refinement: report.timings.refinement,
            total: total_seconds,
        },
        outputs: Outputs {
            eigenpairs: pairs_path,
            eigenvalues: csv_path,
            eigenpairs_sha256: sha256_hex(json.as_bytes()),
        },
        summary: RunSummary {
            eigenpairs: records.len(),
            rank: report.rank,
            singular_values: report.singular_values.clone(),
            expected_delta: report.expected_delta,
            paths_per_column: report.columns.iter().map(|c| c.path_count).collect(),
        },
        warnings: report.warnings.iter().map(describe_warning).collect(),
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    write(&out_dir.join(MANIFEST_FILE), text.as_bytes())?;
    Ok(manifest)
}

/// Human-readable table of the run.
pub fn summary_table(command: &str, cfg: &RunConfig, report: &SolveReport, out_dir: &Path) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "contrace {command}: {} eigenpair(s), {}, N = {}, M = {}",
        report.eigenpairs.len(),
        cfg.contour.describe(),
        cfg.nodes,
        cfg.moments
    );
    if !report.eigenpairs.is_empty() {
        let _ = writeln!(
            s,
            "{:>4}  {:>22}  {:>22}  {:>10}  {:>6}  flags",
            "#", "re(z)", "im(z)", "residual", "inside"
        );
        for (k, p) in report.eigenpairs.iter().enumerate() {
            let flags: Vec<&str> = p.flags.iter().map(|&f| flag_name(f)).collect();
            let _ = writeln!(
                s,
                "{:>4}  {:>22.15e}  {:>22.15e}  {:>10.3e}  {:>6}  {}",
                k + 1,
                p.z.re,
                p.z.im,
                p.residual,
                p.inside,
                flags.join(",")
            );
        }
    }
    if !report.columns.is_empty() {
        let counts: Vec<String> = report.columns.iter().map(|c| c.path_count.to_string()).collect();
        let expected = report
            .expected_delta
            .map(|d| format!(" (expected δ = {d})"))
            .unwrap_or_default();
        let _ = writeln!(s, "paths per column: {}{expected}", counts.join(" "));
    }
    let _ = writeln!(
        s,
        "rank {} from {} singular value(s)",
        report.rank,
        report.singular_values.len()
    );
    let t = &report.timings;
    let _ = writeln!(
        s,
        "time: tracking {:.3} s, moments {:.3} s, extraction {:.3} s, refinement {:.3} s",
        t.tracking, t.moments, t.extraction, t.refinement
    );
    for w in &report.warnings {
        let _ = writeln!(s, "warning: {}", describe_warning(w));
    }
    let _ = writeln!(s, "wrote {}", out_dir.display());
    s
}
