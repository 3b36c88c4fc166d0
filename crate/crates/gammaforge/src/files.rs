//! On-disk formats: generator specs, point lists and coordinate maps.

use std::fs;
use std::path::Path;

use gammaforge_core::catalog::ManifoldTruth;
use gammaforge_core::expr::{ScalarField, SymmetricField, VectorField};
use gammaforge_core::generator::{GeneratorSpec, WeightedForm};
use gammaforge_core::reconstruction::ChartBox;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Generator spec as stored in JSON. Only the upper triangle of each
/// symmetric grid is read.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub dim: usize,
    #[serde(default)]
    pub chart: String,
    pub cometric: Vec<Vec<String>>,
    pub drift: Vec<String>,
    #[serde(default)]
    pub weighted_form: Option<WeightedFormFile>,
    /// Closed-form truths; present on catalog exports and ignored on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<TruthBlock>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedFormFile {
    pub metric: Vec<Vec<String>>,
    pub log_density: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthBlock {
    pub name: String,
    pub metric: Vec<Vec<String>>,
    /// `christoffels[k][i][j] = Γ^k_ij`.
    pub christoffels: Vec<Vec<Vec<String>>>,
    pub ricci: Vec<Vec<String>>,
    pub ricci_mu: Vec<Vec<String>>,
    pub log_rho: String,
    pub sample_box: BoxFile,
    pub notes: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxFile {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

fn check_square(what: &str, rows: &[Vec<String>], dim: usize) -> Result<()> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(CliError::Usage(format!("{what} must be a {dim}×{dim} grid")));
    }
    Ok(())
}

impl SpecFile {
    pub fn to_spec(&self) -> Result<GeneratorSpec> {
        let n = self.dim;
        if !(1..=3).contains(&n) {
            return Err(CliError::Usage(format!("dimension {n} outside 1..=3")));
        }
        check_square("cometric", &self.cometric, n)?;
        if self.drift.len() != n {
            return Err(CliError::Usage(format!("drift needs {n} components, got {}", self.drift.len())));
        }
        let weighted_form = match &self.weighted_form {
            Some(w) => {
                check_square("weighted_form.metric", &w.metric, n)?;
                Some(WeightedForm {
                    metric: SymmetricField::parse_rows(&w.metric)?,
                    log_density: ScalarField::parse(&w.log_density, n)?,
                })
            }
            None => None,
        };
        Ok(GeneratorSpec::new(
            SymmetricField::parse_rows(&self.cometric)?,
            VectorField::parse(&self.drift, n)?,
            self.chart.clone(),
            weighted_form,
        )?)
    }

    pub fn from_spec(spec: &GeneratorSpec) -> Self {
        Self {
            dim: spec.dim(),
            chart: spec.chart.clone(),
            cometric: spec.cometric.sources(),
            drift: spec.drift.sources(),
            weighted_form: spec.weighted_form.as_ref().map(|w| WeightedFormFile {
                metric: w.metric.sources(),
                log_density: w.log_density.expr.to_string(),
            }),
            truth: None,
        }
    }

    /// A catalog entry with its truth block.
    pub fn from_catalog(m: &ManifoldTruth) -> Self {
        let n = m.dim();
        let chris: Vec<String> = m.truth_christoffels.iter().map(|e| e.to_string()).collect();
        Self {
            truth: Some(TruthBlock {
                name: m.name.clone(),
                metric: m.truth_metric.sources(),
                christoffels: (0..n)
                    .map(|k| (0..n).map(|i| (0..n).map(|j| chris[(k * n + i) * n + j].clone()).collect()).collect())
                    .collect(),
                ricci: m.truth_ricci.sources(),
                ricci_mu: m.truth_ricci_mu.sources(),
                log_rho: m.truth_log_rho.expr.to_string(),
                sample_box: BoxFile {
                    lo: m.sample_box.lo.clone(),
                    hi: m.sample_box.hi.clone(),
                },
                notes: m.notes.clone(),
            }),
            ..Self::from_spec(&m.spec)
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PointsFile {
    Bare(Vec<Vec<f64>>),
    Wrapped { points: Vec<Vec<f64>> },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MapFile {
    Bare(Vec<String>),
    Wrapped { components: Vec<String> },
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.into(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.into(),
        source,
    })
}

pub fn load_spec(path: &Path) -> Result<GeneratorSpec> {
    read_json::<SpecFile>(path)?.to_spec()
}

/// Points as `[[x1, x2], ...]` or `{"points": [...]}`, each of length `dim`.
pub fn load_points(path: &Path, dim: usize) -> Result<Vec<Vec<f64>>> {
    let points = match read_json::<PointsFile>(path)? {
        PointsFile::Bare(p) | PointsFile::Wrapped { points: p } => p,
    };
    if points.is_empty() {
        return Err(CliError::Usage(format!("{}: no points", path.display())));
    }
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(CliError::Usage(format!("{}: point {p:?} is not {dim}-dimensional", path.display())));
    }
    Ok(points)
}

/// Map components as `["2*x1 + 1", ...]` or `{"components": [...]}`.
pub fn load_map(path: &Path, dim: usize) -> Result<VectorField> {
    let comps = match read_json::<MapFile>(path)? {
        MapFile::Bare(c) | MapFile::Wrapped { components: c } => c,
    };
    if comps.len() != dim {
        return Err(CliError::Usage(format!("{}: map needs {dim} components", path.display())));
    }
    Ok(VectorField::parse(&comps, dim)?)
}

/// Parses `lo:hi[,lo:hi...]`.
pub fn parse_box(text: &str) -> Result<ChartBox> {
    let bad = || CliError::Usage(format!("box `{text}` is not of the form lo:hi[,lo:hi...]"));
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for axis in text.split(',') {
        let (a, b) = axis.split_once(':').ok_or_else(bad)?;
        lo.push(a.trim().parse::<f64>().map_err(|_| bad())?);
        hi.push(b.trim().parse::<f64>().map_err(|_| bad())?);
    }
    Ok(ChartBox::new(lo, hi)?)
}

/// `n` points per axis at cell centres of `chart_box`.
pub fn grid_points(chart_box: &ChartBox, n: usize) -> Vec<Vec<f64>> {
    let dim = chart_box.dim();
    let total = n.pow(dim as u32);
    (0..total)
        .map(|mut v| {
            let u: Vec<f64> = (0..dim)
                .map(|_| {
                    let i = v % n;
                    v /= n;
                    (i as f64 + 0.5) / n as f64
                })
                .collect();
            chart_box.lerp(&u)
        })
        .collect()
}
