use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::problem::ContourKindFile;

#[derive(Debug, Parser)]
#[command(
    name = "contrace",
    version,
    about = "Contour-integral eigenvalue solver for T(x, z)·x = 0"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenpairs of a polynomial problem inside a contour.
    Solve(RunArgs),
    /// Classical Beyn method for a problem with all `degree_x = 0`.
    Beyn(BeynArgs),
    /// Rational problem through the polynomial lift.
    Repv(RunArgs),
    /// Path and eigenvalue counts of the closed-form families.
    Count(CountArgs),
    /// Roots of a univariate polynomial, printed as CSV.
    Roots(RootsArgs),
    /// Re-run a recorded manifest and compare its result bit for bit.
    Replay(ReplayArgs),
}

/// A residual threshold or `off`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Threshold(pub Option<f64>);

fn parse_threshold(s: &str) -> Result<Threshold, String> {
    match s {
        "off" | "none" => Ok(Threshold(None)),
        _ => s.parse::<f64>().map(|t| Threshold(Some(t))).map_err(|e| e.to_string()),
    }
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(',').ok_or("expected two comma-separated numbers")?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok([num(a)?, num(b)?])
}

#[derive(Clone, Debug, Default, Args)]
pub struct RunArgs {
    /// Problem file (JSON).
    #[arg(long)]
    pub problem: PathBuf,
    /// Config file (JSON); flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Contour shape; inferred from the radius flags when omitted.
    #[arg(long, value_enum)]
    pub contour_kind: Option<ContourKindFile>,
    /// Contour center as `RE,IM`.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub contour_center: Option<[f64; 2]>,
    /// Circle radius.
    #[arg(long)]
    pub contour_radius: Option<f64>,
    /// Ellipse radii as `RX,RY`.
    #[arg(long, value_parser = parse_pair)]
    pub contour_radii: Option<[f64; 2]>,
    /// Rotation of the ellipse axes in radians.
    #[arg(long, allow_hyphen_values = true)]
    pub contour_rotation: Option<f64>,
    /// Quadrature nodes N.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Hankel blocks M.
    #[arg(long)]
    pub moments: Option<usize>,
    /// Master seed for every random choice.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Shift family: dense or monomial.
    #[arg(long)]
    pub shift: Option<String>,
    /// Relative singular-value cutoff for the rank.
    #[arg(long)]
    pub rank_tol: Option<f64>,
    /// Residual filter threshold, or `off`.
    #[arg(long, value_parser = parse_threshold)]
    pub residual_tol: Option<Threshold>,
    /// Keep eigenvalues outside the contour and flag them.
    #[arg(long)]
    pub keep_outside: bool,
    /// Newton-refine every extracted pair.
    #[arg(long)]
    pub refine: bool,
    /// Worker threads; 0 uses all cores.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "contrace-out")]
    pub out_dir: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct BeynArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Probe width q; defaults to n.
    #[arg(long)]
    pub probe_width: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FamilyArg {
    Dense,
    Pyramid,
    Repv,
}

#[derive(Clone, Debug, Args)]
pub struct CountArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Number of variables.
    #[arg(short = 'n')]
    pub n: u64,
    /// x-degree of T.
    #[arg(short = 'd')]
    pub d: Option<u64>,
    /// z-degree of T.
    #[arg(short = 'e')]
    pub e: Option<u64>,
    /// Number of rational terms.
    #[arg(short = 'm')]
    pub m: Option<u64>,
}

#[derive(Clone, Debug, Args)]
pub struct RootsArgs {
    /// JSON list of ascending coefficients, reals or `[re, im]` pairs.
    pub file: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct ReplayArgs {
    /// Manifest written by a previous run.
    pub manifest: PathBuf,
    /// Directory for the replayed outputs; defaults to `replay/` next to
    /// the manifest.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}
