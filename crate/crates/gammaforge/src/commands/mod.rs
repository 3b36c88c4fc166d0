//! The subcommands. Each returns whether its checks passed; errors carry
//! their own exit status.

mod isometry;
mod reconstruct;
mod semigroup;
mod verify;

use std::fs;
use std::path::Path;
use std::sync::Arc;

use gammaforge_core::catalog::{get_manifold, ManifoldTruth};
use gammaforge_core::generator::GeneratorSpec;
use gammaforge_core::jet::Jet;
use gammaforge_core::reconstruction::ChartBox;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Command, Options};
use crate::error::{CliError, Result};
use crate::files::{grid_points, load_points, load_spec, parse_box, SpecFile};
use crate::format::to_json;

pub use isometry::isometry;
pub use reconstruct::reconstruct;
pub use semigroup::semigroup;
pub use verify::verify;

/// Runs `command` after merging its config file. `env_seed` overrides any
/// configured seed.
pub fn run(command: Command, env_seed: Option<u64>) -> Result<bool> {
    let name = command.name();
    let mut options = match command {
        Command::Reconstruct(o) | Command::Verify(o) | Command::Semigroup(o) | Command::Isometry(o) | Command::Export(o) => {
            o.resolve()?
        }
    };
    if env_seed.is_some() {
        options.seed = env_seed;
    }
    match name {
        "reconstruct" => reconstruct(&options),
        "verify" => verify(&options),
        "semigroup" => semigroup(&options),
        "isometry" => isometry(&options),
        _ => export(&options),
    }
}

/// Writes a catalog entry with its truth block.
pub fn export(o: &Options) -> Result<bool> {
    let name = o
        .catalog
        .as_deref()
        .ok_or_else(|| CliError::Usage("export needs --catalog".into()))?;
    let m = get_manifold(name)?;
    emit(o.out.as_deref(), &to_json(&SpecFile::from_catalog(&m)))?;
    Ok(true)
}

pub(crate) fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write {
            path: path.into(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub(crate) fn rng(o: &Options) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(o.seed.unwrap_or(0))
}

/// The spec named by `--spec`, else the catalog entry's.
pub(crate) fn spec_from(o: &Options) -> Result<(GeneratorSpec, Option<ManifoldTruth>)> {
    let entry = o.catalog.as_deref().map(get_manifold).transpose()?;
    let spec = match (&o.spec, &entry) {
        (Some(path), _) => load_spec(path)?,
        (None, Some(m)) => m.spec.clone(),
        (None, None) => return Err(CliError::Usage("needs --spec or --catalog".into())),
    };
    if let Some(m) = &entry {
        if m.dim() != spec.dim() {
            return Err(CliError::Usage(format!("spec is {}-dimensional, catalog entry {}", spec.dim(), m.dim())));
        }
    }
    Ok((spec, entry))
}

/// Sample points from `--points`, else a `--grid` lattice over `--box`, else
/// `--samples` random points in `fallback`.
pub(crate) fn points_from(
    o: &Options,
    dim: usize,
    fallback: Option<&ChartBox>,
    default_samples: usize,
) -> Result<Vec<Vec<f64>>> {
    if let Some(path) = &o.points {
        return load_points(path, dim);
    }
    if let Some(text) = &o.chart_box {
        let b = parse_box(text)?;
        if b.dim() != dim {
            return Err(CliError::Usage(format!("box is {}-dimensional, spec {dim}", b.dim())));
        }
        let n = o.grid.unwrap_or(5);
        if n == 0 {
            return Err(CliError::Usage("grid needs at least one point per axis".into()));
        }
        return Ok(grid_points(&b, n));
    }
    match fallback {
        Some(b) => {
            let n = o.samples.unwrap_or(default_samples);
            if n == 0 {
                return Err(CliError::Usage("needs at least one sample".into()));
            }
            let mut r = rng(o);
            Ok((0..n)
                .map(|_| b.lerp(&(0..dim).map(|_| r.random_range(0.0..=1.0)).collect::<Vec<_>>()))
                .collect())
        }
        None => Err(CliError::Usage("needs --points or --box".into())),
    }
}

/// Jet with derivatives drawn uniformly from `[-1, 1]`.
pub(crate) fn random_jet(spec: &GeneratorSpec, x: &[f64], order: usize, r: &mut impl Rng) -> Result<Jet> {
    let p: Arc<[f64]> = Arc::from(x);
    Ok(Jet::from_fn(spec.layout(), order, p, |_| r.random_range(-1.0..=1.0))?)
}
