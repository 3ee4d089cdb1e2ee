//! Resolved run configuration: config file merged with command-line flags.

use contrace::solver::DEFAULT_SEED;
use contrace::{Contour, ShiftStyle, SolveConfig, C64};
use serde::{Deserialize, Serialize};

use crate::args::RunArgs;
use crate::problem::{parse_config, ContourFile, ContourKindFile};
use crate::CliError;

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq)]
pub struct ContourSpec {
    pub kind: ContourKindFile,
    pub center: [f64; 2],
    pub radii: [f64; 2],
    pub rotation: f64,
}

impl ContourSpec {
    pub fn contour(&self) -> Result<Contour, CliError> {
        let center = C64::new(self.center[0], self.center[1]);
        let built = match self.kind {
            ContourKindFile::Circle => Contour::circle(center, self.radii[0]).map(|mut c| {
                c.rotation = self.rotation;
                c
            }),
            ContourKindFile::Ellipse => Contour::ellipse(center, self.radii[0], self.radii[1], self.rotation),
        };
        built.map_err(|e| CliError::Validation(format!("contour: {e}")))
    }

    pub fn describe(&self) -> String {
        let [cr, ci] = self.center;
        match self.kind {
            ContourKindFile::Circle => format!("circle center ({cr}, {ci}) radius {}", self.radii[0]),
            ContourKindFile::Ellipse => format!(
                "ellipse center ({cr}, {ci}) radii ({}, {}) rotation {}",
                self.radii[0], self.radii[1], self.rotation
            ),
        }
    }

    fn resolve(file: Option<ContourFile>, args: &RunArgs) -> Result<Self, CliError> {
        let file = file.unwrap_or(ContourFile {
            kind: None,
            center: None,
            radius: None,
            radii: None,
            rotation: None,
        });
        let radius = args.contour_radius.or(if args.contour_radii.is_some() {
            None
        } else {
            file.radius
        });
        let radii = args.contour_radii.or(if args.contour_radius.is_some() {
            None
        } else {
            file.radii
        });
        let kind = match args.contour_kind.or(file.kind) {
            Some(k) => k,
            None if radii.is_some() => ContourKindFile::Ellipse,
            None if radius.is_some() => ContourKindFile::Circle,
            None => {
                return Err(CliError::Validation(
                    "no contour given; pass --contour-radius or --contour-radii".into(),
                ))
            }
        };
        let radii = match (kind, radius, radii) {
            (ContourKindFile::Circle, Some(r), _) => [r, r],
            (ContourKindFile::Circle, None, Some([rx, ry])) if rx == ry => [rx, ry],
            (ContourKindFile::Circle, _, _) => {
                return Err(CliError::Validation("a circle needs one radius".into()));
            }
            (ContourKindFile::Ellipse, _, Some(r)) => r,
            (ContourKindFile::Ellipse, Some(r), None) => [r, r],
            (ContourKindFile::Ellipse, None, None) => {
                return Err(CliError::Validation("an ellipse needs --contour-radii RX,RY".into()));
            }
        };
        Ok(ContourSpec {
            kind,
            center: args.contour_center.or(file.center).unwrap_or([0.0, 0.0]),
            radii,
            rotation: args.contour_rotation.or(file.rotation).unwrap_or(0.0),
        })
    }
}

/// Everything that determines a run's results, as recorded in manifests.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
pub struct RunConfig {
    pub contour: ContourSpec,
    pub nodes: usize,
    pub moments: usize,
    pub seed: u64,
    pub shift: String,
    pub rank_tol: f64,
    pub residual_tol: Option<f64>,
    pub keep_outside: bool,
    pub refine: bool,
    pub threads: usize,
    pub probe_width: Option<usize>,
}

impl RunConfig {
    pub fn resolve(args: &RunArgs, probe_width: Option<usize>) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => parse_config(path)?,
            None => Default::default(),
        };
        let defaults = SolveConfig::default();
        let shift = match args.shift.as_deref().or(file.shift.as_deref()) {
            None | Some("dense") => "dense",
            Some("monomial") => "monomial",
            Some(other) => return Err(CliError::Validation(format!("unknown shift style `{other}`"))),
        };
        Ok(RunConfig {
            contour: ContourSpec::resolve(file.contour, args)?,
            nodes: args.nodes.or(file.nodes).unwrap_or(defaults.nodes),
            moments: args.moments.or(file.moments).unwrap_or(defaults.moments),
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            shift: shift.to_string(),
            rank_tol: args.rank_tol.or(file.rank_tol).unwrap_or(defaults.tol_rank),
            residual_tol: match (args.residual_tol, file.residual_tol) {
                (Some(t), _) => t.0,
                (None, Some(t)) => t,
                (None, None) => defaults.residual_threshold,
            },
            keep_outside: args.keep_outside || file.keep_outside.unwrap_or(false),
            refine: args.refine || file.refine.unwrap_or(false),
            threads: args.threads.or(file.threads).unwrap_or(0),
            probe_width,
        })
    }

    pub fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            nodes: self.nodes,
            moments: self.moments,
            seed: self.seed,
            shift_style: if self.shift == "monomial" {
                ShiftStyle::Monomial
            } else {
                ShiftStyle::Dense
            },
            tol_rank: self.rank_tol,
            residual_threshold: self.residual_tol,
            keep_outside: self.keep_outside,
            refine: self.refine,
            ..SolveConfig::default()
        }
    }
}
