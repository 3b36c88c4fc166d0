//! Run configuration: command-line flags merged over an optional JSON file.

use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::{CliError, Result};
use crate::files::read_json;

#[derive(Debug, Parser)]
#[command(name = "gammaforge", version, about = "Recover weighted Riemannian geometry from diffusion generators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Metric, connection, Ricci and drift at each point of a spec.
    Reconstruct(Options),
    /// Compare a reconstruction against a catalog entry's closed forms.
    Verify(Options),
    /// Heat-flow experiments on a periodic grid.
    Semigroup(Options),
    /// Test whether a coordinate map is an isometry between two specs.
    Isometry(Options),
    /// Write a catalog entry as a spec file with its truth block.
    Export(Options),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Reconstruct(_) => "reconstruct",
            Self::Verify(_) => "verify",
            Self::Semigroup(_) => "semigroup",
            Self::Isometry(_) => "isometry",
            Self::Export(_) => "export",
        }
    }

    pub fn options(&self) -> &Options {
        match self {
            Self::Reconstruct(o) | Self::Verify(o) | Self::Semigroup(o) | Self::Isometry(o) | Self::Export(o) => o,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
pub enum SignChoice {
    #[value(name = "auto")]
    #[serde(rename = "auto")]
    Auto,
    #[value(name = "+1", alias = "1")]
    #[serde(rename = "+1", alias = "1")]
    Plus,
    #[value(name = "-1")]
    #[serde(rename = "-1")]
    Minus,
}

/// Every setting a command may read. Keys of the JSON config file are the
/// flag names with `-` replaced by `_`.
#[derive(Clone, Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    /// JSON file supplying any of these options; flags take precedence.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Generator spec file.
    #[arg(long, value_name = "FILE")]
    pub spec: Option<PathBuf>,

    /// Second generator spec, the target of `--map`.
    #[arg(long, value_name = "FILE")]
    pub spec_b: Option<PathBuf>,

    /// Coordinate map file.
    #[arg(long, value_name = "FILE")]
    pub map: Option<PathBuf>,

    /// Point list file.
    #[arg(long, value_name = "FILE")]
    pub points: Option<PathBuf>,

    /// Catalog manifold name.
    #[arg(long, value_name = "NAME")]
    pub catalog: Option<String>,

    /// Points per axis.
    #[arg(long, value_name = "N")]
    pub grid: Option<usize>,

    /// Coordinate box.
    #[arg(long = "box", value_name = "LO:HI[,LO:HI...]", allow_hyphen_values = true)]
    #[serde(rename = "box")]
    pub chart_box: Option<String>,

    /// Comma-separated observation times.
    #[arg(long, value_name = "T1,T2,...", value_delimiter = ',')]
    pub times: Option<Vec<f64>>,

    /// Order of the random probe jets, 2 to 4.
    #[arg(long, value_name = "K")]
    pub jet_order: Option<usize>,

    /// Tolerance deciding the exit status.
    #[arg(long, value_name = "TOL")]
    pub tol: Option<f64>,

    /// Sign of the log-density Hessian in the weighted Ricci tensor.
    #[arg(long, value_name = "SIGN", allow_hyphen_values = true)]
    pub bochner_sign: Option<SignChoice>,

    /// Output file, or directory for `semigroup`.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Number of random sample points.
    #[arg(long, value_name = "N")]
    pub samples: Option<usize>,

    /// Initial field for the Γ-limit table.
    #[arg(long, value_name = "EXPR")]
    pub probe: Option<String>,

    /// Label set `{EXPR > 0}`; defaults to the lower half of the first axis.
    #[arg(long, value_name = "EXPR")]
    pub label: Option<String>,

    /// Time of the dissipation check.
    #[arg(long, value_name = "T")]
    pub dissipation_time: Option<f64>,

    /// Repeat the dissipation check with the grid doubled and the step halved.
    #[arg(long, action = ArgAction::SetTrue)]
    pub refine: bool,

    /// Seed for random probes and sample points; `GAMMAFORGE_SEED` wins over this.
    #[arg(skip)]
    pub seed: Option<u64>,
}

impl Options {
    /// Flags over `file`; `config` and `seed` are taken from `file` only
    /// where the flags leave them unset.
    pub fn over(self, file: Options) -> Options {
        Options {
            config: self.config,
            spec: self.spec.or(file.spec),
            spec_b: self.spec_b.or(file.spec_b),
            map: self.map.or(file.map),
            points: self.points.or(file.points),
            catalog: self.catalog.or(file.catalog),
            grid: self.grid.or(file.grid),
            chart_box: self.chart_box.or(file.chart_box),
            times: self.times.or(file.times),
            jet_order: self.jet_order.or(file.jet_order),
            tol: self.tol.or(file.tol),
            bochner_sign: self.bochner_sign.or(file.bochner_sign),
            out: self.out.or(file.out),
            samples: self.samples.or(file.samples),
            probe: self.probe.or(file.probe),
            label: self.label.or(file.label),
            dissipation_time: self.dissipation_time.or(file.dissipation_time),
            refine: self.refine || file.refine,
            seed: self.seed.or(file.seed),
        }
    }

    /// Merges the `--config` file if one was given. Relative paths inside
    /// the file resolve against the file's directory.
    pub fn resolve(self) -> Result<Options> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let mut file: Options = read_json(&path)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut file.spec, &mut file.spec_b, &mut file.map, &mut file.points, &mut file.out]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(self.over(file))
    }

    pub fn tolerance(&self, default: f64) -> Result<f64> {
        let tol = self.tol.unwrap_or(default);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Usage(format!("tolerance must be positive, got {tol}")));
        }
        Ok(tol)
    }

    pub fn jet_order(&self, default: usize) -> Result<usize> {
        let k = self.jet_order.unwrap_or(default);
        if !(2..=4).contains(&k) {
            return Err(CliError::Usage(format!("jet order must lie in 2..=4, got {k}")));
        }
        Ok(k)
    }
}
