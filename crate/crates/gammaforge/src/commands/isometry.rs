use gammaforge_core::reconstruction::check_conjugacy;

use crate::config::Options;
use crate::error::{CliError, Result};
use crate::files::{load_map, load_spec};
use crate::format::to_json;
use crate::report::ConjugacyJson;

use super::{emit, points_from};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Checks `--map` from `--spec` to `--spec-b` at the sample points; passes
/// iff the verdict is isometry.
pub fn isometry(o: &Options) -> Result<bool> {
    let need = |p: &Option<std::path::PathBuf>, flag: &str| {
        p.clone().ok_or_else(|| CliError::Usage(format!("isometry needs {flag}")))
    };
    let spec_a = load_spec(&need(&o.spec, "--spec")?)?;
    let spec_b = load_spec(&need(&o.spec_b, "--spec-b")?)?;
    let phi = load_map(&need(&o.map, "--map")?, spec_a.dim())?;
    let points = points_from(o, spec_a.dim(), None, 0)?;
    let tol = o.tolerance(DEFAULT_TOL)?;
    let report = check_conjugacy(&spec_a, &spec_b, &phi, &points)?;
    let out = ConjugacyJson::new(&report, tol);
    let pass = out.verdict == "isometry";
    emit(o.out.as_deref(), &to_json(&out))?;
    Ok(pass)
}
