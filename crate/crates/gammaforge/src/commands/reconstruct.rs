use gammaforge_core::generator::GeneratorSpec;
use gammaforge_core::jet::Jet;
use gammaforge_core::oracle::{bochner_sign_residuals, WEIGHTED_HESSIAN_SIGN};
use gammaforge_core::reconstruction::reconstruct_point;
use serde::Serialize;

use crate::config::{Options, SignChoice};
use crate::error::Result;
use crate::format::to_json;
use crate::report::ReportJson;

use super::{emit, points_from, random_jet, rng, spec_from};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_JET_ORDER: usize = 3;
/// Random probe jets per point for the Bochner check.
pub const PROBES_PER_POINT: usize = 4;
const DEFAULT_SAMPLES: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignRecord {
    pub value: f64,
    /// `flag`, `resolved` (exactly one sign fits the probes) or `default`.
    pub source: &'static str,
    pub residual_plus: Option<f64>,
    pub residual_minus: Option<f64>,
}

#[derive(Serialize)]
struct Meta {
    seed: u64,
    jet_order: usize,
    probes_per_point: usize,
    tolerance: f64,
    bochner_sign: SignRecord,
    within_tolerance: bool,
}

#[derive(Serialize)]
struct Output {
    meta: Meta,
    reports: Vec<ReportJson>,
}

/// Sign of the `∇² log ρ` term: the flag's choice, else the one sign the
/// probes single out, else the library default.
pub fn choose_sign(choice: SignChoice, spec: &GeneratorSpec, probes: &[Jet], tol: f64) -> Result<SignRecord> {
    let (value, source) = match choice {
        SignChoice::Plus => (1.0, "flag"),
        SignChoice::Minus => (-1.0, "flag"),
        SignChoice::Auto => (WEIGHTED_HESSIAN_SIGN, "default"),
    };
    if probes.is_empty() {
        return Ok(SignRecord {
            value,
            source,
            residual_plus: None,
            residual_minus: None,
        });
    }
    let (plus, minus) = bochner_sign_residuals(spec, probes)?;
    let (value, source) = match (choice, plus <= tol, minus <= tol) {
        (SignChoice::Auto, true, false) => (1.0, "resolved"),
        (SignChoice::Auto, false, true) => (-1.0, "resolved"),
        _ => (value, source),
    };
    Ok(SignRecord {
        value,
        source,
        residual_plus: Some(plus),
        residual_minus: Some(minus),
    })
}

pub fn reconstruct(o: &Options) -> Result<bool> {
    let (spec, entry) = spec_from(o)?;
    let points = points_from(o, spec.dim(), entry.as_ref().map(|m| &m.sample_box), DEFAULT_SAMPLES)?;
    let tol = o.tolerance(DEFAULT_TOL)?;
    let order = o.jet_order(DEFAULT_JET_ORDER)?;
    let mut r = rng(o);
    let mut probes = Vec::with_capacity(points.len());
    for x in &points {
        spec.point(x)?;
        // Γ₂ needs third derivatives, so order-2 runs skip the Bochner check
        let k = if order >= 3 { PROBES_PER_POINT } else { 0 };
        probes.push((0..k).map(|_| random_jet(&spec, x, order, &mut r)).collect::<Result<Vec<_>>>()?);
    }
    let sign = choose_sign(o.bochner_sign.unwrap_or(SignChoice::Auto), &spec, &probes.concat(), tol)?;
    let mut reports = Vec::with_capacity(points.len());
    let mut within = true;
    for (x, p) in points.iter().zip(&probes) {
        let rep = reconstruct_point(&spec, x, p, sign.value)?;
        let d = &rep.diagnostics;
        within &= d.koszul_crosscheck <= tol && d.bochner_residual <= tol && d.ricci_crosscheck <= tol;
        reports.push(ReportJson::from(&rep));
    }
    let out = Output {
        meta: Meta {
            seed: o.seed.unwrap_or(0),
            jet_order: order,
            probes_per_point: if order >= 3 { PROBES_PER_POINT } else { 0 },
            tolerance: tol,
            bochner_sign: sign,
            within_tolerance: within,
        },
        reports,
    };
    emit(o.out.as_deref(), &to_json(&out))?;
    Ok(within)
}
