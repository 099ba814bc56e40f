//! Experiment configuration files.
//!
//! ```toml
//! experiment = "converge-dc"
//! family = "localizing"
//! field = "identity"
//! seed = 7
//! eps = [0.4, 0.2, 0.1, 0.05]
//!
//! [domain]
//! shape = "ball"
//! d = 2
//! radius = 1.0
//!
//! [quad]
//! rel_tol = 1e-5
//!
//! [output]
//! dir = "out"
//! format = "csv+svg"
//! ```

use crate::registry::{Experiment, FamilyName, FieldName, Named, ShapeName};
use serde::Deserialize;
use std::fmt;
use std::path::PathBuf;

/// A problem with a configuration, optionally tied to a line of the file.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub shape: Option<String>,
    pub d: Option<usize>,
    pub radius: Option<f64>,
    pub center: Option<Vec<f64>>,
    pub half_widths: Option<Vec<f64>>,
    pub a: Option<f64>,
    pub b: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct QuadSection {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_evals: Option<u64>,
    pub method: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub format: Option<String>,
}

/// The file as written, before validation.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub experiment: Option<String>,
    pub family: Option<String>,
    pub field: Option<String>,
    pub seed: Option<u64>,
    pub eps: Option<Vec<f64>>,
    pub s: Option<Vec<f64>>,
    pub p: Option<Vec<f64>>,
    pub eps_moll: Option<Vec<f64>>,
    pub lambda: Option<Vec<f64>>,
    /// Distance beyond which approximate-identity mass is reported.
    pub delta: Option<f64>,
    /// Evaluation point for curvature.
    pub point: Option<Vec<f64>>,
    /// Final-point relative tolerance for convergence studies.
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub domain: DomainSpec,
    #[serde(default)]
    pub quad: QuadSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    CsvSvg,
}

/// A validated configuration with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub experiment: Experiment,
    pub shape: ShapeName,
    pub domain: DomainSpec,
    pub family: FamilyName,
    pub field: FieldName,
    pub seed: u64,
    pub eps: Vec<f64>,
    pub s: Vec<f64>,
    pub p: Vec<f64>,
    pub eps_moll: Vec<f64>,
    pub lambda: Vec<f64>,
    pub delta: f64,
    pub point: Option<Vec<f64>>,
    pub tolerance: Option<f64>,
    pub quad: QuadSection,
    pub out_dir: PathBuf,
    pub format: Format,
}

pub const DEFAULT_EPS: [f64; 4] = [0.4, 0.2, 0.1, 0.05];
pub const DEFAULT_S: [f64; 5] = [0.3, 0.5, 0.7, 0.9, 0.95];
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Parses and validates `text`. Unknown keys, unknown registry names and
/// out-of-range values are all reported, each with its line when known.
pub fn parse_config(text: &str) -> Result<Config, Vec<Diagnostic>> {
    parse_config_as(text, None)
}

/// Like [`parse_config`] for a known experiment: a missing `experiment` key
/// takes `expected`, a different one is an error.
pub fn parse_config_as(
    text: &str,
    expected: Option<Experiment>,
) -> Result<Config, Vec<Diagnostic>> {
    let mut raw: RawConfig = toml::from_str(text).map_err(|e| {
        vec![Diagnostic {
            line: e.span().map(|s| line_of(text, s.start)),
            message: e.message().to_string(),
        }]
    })?;
    if let Some(exp) = expected {
        match raw.experiment.as_deref() {
            None => raw.experiment = Some(exp.name().to_string()),
            Some(name) if name != exp.name() => {
                return Err(vec![Diagnostic {
                    line: line_of_key(text, "experiment"),
                    message: format!(
                        "experiment `{name}` does not match subcommand `{}`",
                        exp.name()
                    ),
                }])
            }
            Some(_) => {}
        }
    }
    validate(raw, Some(text))
}

/// Validates a raw configuration; `text` locates diagnostics when given.
pub fn validate(raw: RawConfig, text: Option<&str>) -> Result<Config, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let at = |key: &str| text.and_then(|t| line_of_key(t, key));
    let mut err = |key: &str, message: String| {
        diags.push(Diagnostic {
            line: at(key),
            message,
        })
    };

    let experiment = match raw.experiment.as_deref() {
        None => {
            err("experiment", "missing key `experiment`".into());
            None
        }
        Some(name) => lookup::<Experiment>(name, "experiment", &mut err),
    };
    let shape = lookup::<ShapeName>(
        raw.domain.shape.as_deref().unwrap_or("ball"),
        "shape",
        &mut err,
    );
    let family = lookup::<FamilyName>(
        raw.family.as_deref().unwrap_or("localizing"),
        "family",
        &mut err,
    );
    let field = lookup::<FieldName>(
        raw.field.as_deref().unwrap_or("identity"),
        "field",
        &mut err,
    );

    if let Some(d) = raw.domain.d {
        if !(1..=3).contains(&d) {
            err("d", format!("d = {d} out of range: expected 1, 2 or 3"));
        }
    }
    for (key, v) in [
        ("radius", raw.domain.radius),
        ("a", raw.domain.a),
        ("b", raw.domain.b),
        ("delta", raw.delta),
        ("tolerance", raw.tolerance),
    ] {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                err(key, format!("{key} = {v} out of range: must be positive"));
            }
        }
    }
    let mut grid = |key: &str, v: &Option<Vec<f64>>, lo: f64, hi: f64, closed_lo: bool| {
        if let Some(vals) = v {
            if vals.is_empty() {
                err(key, format!("`{key}` must not be empty"));
            }
            for &x in vals {
                let ok = if closed_lo { x >= lo } else { x > lo } && x < hi;
                if !ok {
                    let open = if closed_lo { "[" } else { "(" };
                    err(
                        key,
                        format!("{key} = {x} out of range: must lie in {open}{lo}, {hi})"),
                    );
                }
            }
        }
    };
    grid("eps", &raw.eps, 0.0, 1.0, false);
    grid("s", &raw.s, 0.0, 1.0, false);
    grid("p", &raw.p, 2.0, f64::INFINITY, true);
    grid("eps_moll", &raw.eps_moll, 0.0, 0.5, false);
    grid("lambda", &raw.lambda, 0.0, f64::INFINITY, false);
    if let Some(t) = raw.quad.rel_tol {
        if !(t > 0.0) {
            err(
                "rel_tol",
                format!("rel_tol = {t} out of range: must be positive"),
            );
        }
    }
    if let Some(t) = raw.quad.abs_tol {
        if !(t > 0.0) {
            err(
                "abs_tol",
                format!("abs_tol = {t} out of range: must be positive"),
            );
        }
    }
    if let Some(m) = &raw.quad.method {
        if let Err(e) = m.parse::<nonlocal::Method>() {
            err("method", e);
        }
    }
    let format = match raw.output.format.as_deref() {
        None | Some("csv") => Format::Csv,
        Some("csv+svg") => Format::CsvSvg,
        Some(other) => {
            err(
                "format",
                format!("unknown format `{other}` (expected csv, csv+svg)"),
            );
            Format::Csv
        }
    };
    let (Some(experiment), Some(shape), Some(family), Some(field)) =
        (experiment, shape, family, field)
    else {
        return Err(diags);
    };
    if !diags.is_empty() {
        return Err(diags);
    }
    Ok(Config {
        experiment,
        shape,
        domain: raw.domain,
        family,
        field,
        seed: raw.seed.unwrap_or(DEFAULT_SEED),
        eps: raw.eps.unwrap_or_else(|| experiment.default_eps()),
        s: raw.s.unwrap_or_else(|| experiment.default_s()),
        p: raw.p.unwrap_or_else(|| vec![2.0, 3.0]),
        eps_moll: raw
            .eps_moll
            .unwrap_or_else(|| nonlocal::experiments::MOLLIFIER_GRID.to_vec()),
        lambda: raw.lambda.unwrap_or_else(|| vec![0.5, 2.0]),
        delta: raw.delta.unwrap_or(0.2),
        point: raw.point,
        tolerance: raw.tolerance,
        quad: raw.quad,
        out_dir: raw.output.dir.unwrap_or_else(|| PathBuf::from("out")),
        format,
    })
}

/// Resolves a registry name, recording a diagnostic that lists the
/// registry when it is unknown.
fn lookup<T: Named>(name: &str, key: &str, err: &mut impl FnMut(&str, String)) -> Option<T> {
    match T::from_name(name) {
        Some(v) => Some(v),
        None => {
            let names: Vec<&str> = T::ALL.iter().map(|v| v.name()).collect();
            err(
                key,
                format!("unknown {} `{name}`; known: {}", T::KIND, names.join(", ")),
            );
            None
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of the first `key = ...` assignment.
fn line_of_key(text: &str, key: &str) -> Option<usize> {
    text.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
}
