//! Problem, coefficient and config file formats.

use std::path::Path;

use contrace::repv::REPvProblem;
use contrace::{CMatrix, PolyMatrixT, XPoly, XTerm, ZPoly, C64};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A complex number written either as a bare real or as `[re, im]`.
#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum Cx {
    Real(f64),
    Pair([f64; 2]),
}

impl Cx {
    pub fn value(self) -> C64 {
        match self {
            Cx::Real(re) => C64::new(re, 0.0),
            Cx::Pair([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub xexp: Vec<u32>,
    pub zcoeffs: Vec<Cx>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowFile {
    pub degree_x: u32,
    pub entries: Vec<Vec<TermFile>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PepvFile {
    #[serde(default)]
    pub kind: Option<String>,
    pub n: usize,
    pub z_degree: usize,
    pub rows: Vec<RowFile>,
}

/// A matrix given either as `n` rows or as `n²` row-major entries.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum MatrixFile {
    Nested(Vec<Vec<Cx>>),
    Flat(Vec<Cx>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepvFile {
    pub kind: String,
    pub n: usize,
    pub m: usize,
    #[serde(rename = "A")]
    pub a: MatrixFile,
    #[serde(rename = "B")]
    pub b: MatrixFile,
    #[serde(rename = "T")]
    pub t: Vec<MatrixFile>,
    pub r: Vec<Vec<Cx>>,
    pub s: Vec<Vec<Cx>>,
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn json_error(path: &Path, e: serde_json::Error) -> CliError {
    CliError::Validation(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
}

/// 1-based line of the `k`-th (1-based) occurrence of `key` in `text`.
fn line_of_key(text: &str, key: &str, k: usize) -> Option<usize> {
    let needle = format!("\"{key}\"");
    let (offset, _) = text.match_indices(&needle).nth(k.checked_sub(1)?)?;
    Some(text[..offset].matches('\n').count() + 1)
}

fn xpoly(n: usize, terms: &[TermFile]) -> Result<XPoly, String> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        if t.xexp.len() != n {
            return Err(format!("xexp has {} exponents, expected {n}", t.xexp.len()));
        }
        out.push(XTerm::new(
            t.xexp.clone(),
            ZPoly::new(t.zcoeffs.iter().map(|c| c.value()).collect()),
        ));
    }
    XPoly::new(n, out).map_err(|e| e.to_string())
}

/// Parses a PEPv problem file. Row errors point at the line of the row's
/// `degree_x` key.
pub fn parse_pepv(path: &Path, text: &str) -> Result<PolyMatrixT, CliError> {
    let file: PepvFile = serde_json::from_str(text).map_err(|e| json_error(path, e))?;
    let at_row = |row: usize, msg: String| {
        let line = line_of_key(text, "degree_x", row).unwrap_or(1);
        CliError::Validation(format!("{}:{line}: {msg}", path.display()))
    };
    if let Some(kind) = &file.kind {
        if kind != "pepv" {
            return Err(CliError::Validation(format!(
                "{}: problem kind `{kind}` is not a PEPv; use the matching subcommand",
                path.display()
            )));
        }
    }
    if file.n == 0 || file.rows.len() != file.n {
        return Err(CliError::Validation(format!(
            "{}: expected n = {} rows, found {}",
            path.display(),
            file.n,
            file.rows.len()
        )));
    }
    let mut rows = Vec::with_capacity(file.n);
    for (i, row) in file.rows.iter().enumerate() {
        if row.entries.len() != file.n {
            return Err(at_row(
                i + 1,
                format!("row {} has {} entries, expected {}", i + 1, row.entries.len(), file.n),
            ));
        }
        let entries = row
            .entries
            .iter()
            .map(|terms| xpoly(file.n, terms))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|msg| at_row(i + 1, format!("row {}: {msg}", i + 1)))?;
        rows.push(entries);
    }
    let degrees: Vec<u32> = file.rows.iter().map(|r| r.degree_x).collect();
    PolyMatrixT::with_degrees(rows, &degrees, file.z_degree).map_err(|e| {
        let row = match e {
            contrace::poly::PolyError::InhomogeneousRow(r)
            | contrace::poly::PolyError::DegreeMismatch(r)
            | contrace::poly::PolyError::ZeroRow(r)
            | contrace::poly::PolyError::ZDegreeExceeded(r) => Some(r),
            _ => None,
        };
        match row {
            Some(r) => at_row(r, e.to_string()),
            None => CliError::Validation(format!("{}: {e}", path.display())),
        }
    })
}

fn matrix(name: &str, n: usize, m: &MatrixFile) -> Result<CMatrix, String> {
    let flat: Vec<C64> = match m {
        MatrixFile::Flat(v) => v.iter().map(|c| c.value()).collect(),
        MatrixFile::Nested(rows) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(format!("{name} must be {n}×{n}"));
            }
            rows.iter().flatten().map(|c| c.value()).collect()
        }
    };
    if flat.len() != n * n {
        return Err(format!("{name} must have {} entries, found {}", n * n, flat.len()));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| flat[i * n + j]))
}

pub fn parse_repv(path: &Path, text: &str) -> Result<REPvProblem, CliError> {
    let file: RepvFile = serde_json::from_str(text).map_err(|e| json_error(path, e))?;
    let bad = |msg: String| CliError::Validation(format!("{}: {msg}", path.display()));
    if file.kind != "repv" {
        return Err(bad(format!("expected kind \"repv\", found \"{}\"", file.kind)));
    }
    let n = file.n;
    if n == 0 {
        return Err(bad("n must be at least 1".into()));
    }
    if file.t.len() != file.m || file.r.len() != file.m || file.s.len() != file.m {
        return Err(bad(format!(
            "m = {} but T, r, s have {}, {}, {} entries",
            file.m,
            file.t.len(),
            file.r.len(),
            file.s.len()
        )));
    }
    let a = matrix("A", n, &file.a).map_err(bad)?;
    let b = matrix("B", n, &file.b).map_err(bad)?;
    let t = file
        .t
        .iter()
        .enumerate()
        .map(|(k, m)| matrix(&format!("T[{k}]"), n, m))
        .collect::<Result<Vec<_>, _>>()
        .map_err(bad)?;
    let vecs = |v: &[Vec<Cx>]| {
        v.iter()
            .map(|f| f.iter().map(|c| c.value()).collect())
            .collect::<Vec<Vec<C64>>>()
    };
    REPvProblem::new(a, b, t, vecs(&file.r), vecs(&file.s)).map_err(|e| bad(e.to_string()))
}

/// Ascending polynomial coefficients, `c_0` first.
pub fn parse_coefficients(path: &Path, text: &str) -> Result<Vec<C64>, CliError> {
    let raw: Vec<Cx> = serde_json::from_str(text).map_err(|e| json_error(path, e))?;
    Ok(raw.into_iter().map(Cx::value).collect())
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ContourKindFile {
    Circle,
    Ellipse,
}

/// Contour as written in config files and manifests.
#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ContourFile {
    pub kind: Option<ContourKindFile>,
    pub center: Option<[f64; 2]>,
    pub radius: Option<f64>,
    pub radii: Option<[f64; 2]>,
    pub rotation: Option<f64>,
}

/// Config file; every field is optional and command-line flags win.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub contour: Option<ContourFile>,
    #[serde(alias = "N")]
    pub nodes: Option<usize>,
    #[serde(alias = "M")]
    pub moments: Option<usize>,
    pub seed: Option<u64>,
    pub shift: Option<String>,
    pub rank_tol: Option<f64>,
    /// `null` disables the residual filter.
    #[serde(default, deserialize_with = "explicit_option")]
    pub residual_tol: Option<Option<f64>>,
    pub keep_outside: Option<bool>,
    pub refine: Option<bool>,
    pub threads: Option<usize>,
}

fn explicit_option<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<Option<f64>>, D::Error> {
    Option::<f64>::deserialize(d).map(Some)
}

pub fn parse_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| json_error(path, e))
}
