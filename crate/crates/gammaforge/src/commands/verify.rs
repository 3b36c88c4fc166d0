use gammaforge_core::reconstruction::{
    recover_christoffels_intrinsic, recover_cometric, recover_drift, recover_log_density, recover_metric,
    recover_ricci_mu,
};
use gammaforge_core::tensor::{max_abs_diff, max_abs_diff_slice};
use serde::Serialize;

use crate::config::Options;
use crate::error::{CliError, Result};
use crate::format::to_json;

use super::{emit, points_from, spec_from};

pub const DEFAULT_TOL: f64 = 1e-7;
const DEFAULT_SAMPLES: usize = 50;

/// Largest absolute deviation from the closed forms, per tensor.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Deviations {
    pub cometric: f64,
    pub metric: f64,
    pub christoffels: f64,
    pub ricci_mu: f64,
    #[serde(rename = "drift_Z")]
    pub drift_z: f64,
    /// Up to the additive constant fixed at the first sample.
    pub log_rho: f64,
}

impl Deviations {
    pub fn max(&self) -> f64 {
        [self.cometric, self.metric, self.christoffels, self.ricci_mu, self.drift_z, self.log_rho]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[derive(Serialize)]
struct Output<'a> {
    catalog: &'a str,
    samples: usize,
    seed: u64,
    tolerance: f64,
    deviations: Deviations,
    within_tolerance: bool,
}

pub fn verify(o: &Options) -> Result<bool> {
    if o.catalog.is_none() {
        return Err(CliError::Usage("verify needs --catalog".into()));
    }
    let (spec, entry) = spec_from(o)?;
    let m = entry.expect("catalog checked above");
    let points = points_from(o, m.dim(), Some(&m.sample_box), DEFAULT_SAMPLES)?;
    let tol = o.tolerance(DEFAULT_TOL)?;
    let layout = spec.layout();

    let mut dev = Deviations::default();
    for x in &points {
        let truth_metric = m.metric_at(x)?;
        let truth_cometric = truth_metric.clone().try_inverse().ok_or_else(|| {
            CliError::Usage(format!("catalog metric of {} is singular at {x:?}", m.name))
        })?;
        let recovered = recover_metric(&spec, x)?;
        dev.cometric = dev.cometric.max(max_abs_diff(&recover_cometric(&spec, x)?, &truth_cometric));
        dev.metric = dev.metric.max(max_abs_diff(&recovered.metric, &truth_metric));
        let chris = recover_christoffels_intrinsic(&spec, x)?.connection;
        dev.christoffels = dev.christoffels.max(chris.max_abs_diff(&m.christoffels_at(x)?));
        dev.ricci_mu = dev.ricci_mu.max(max_abs_diff(&recover_ricci_mu(&spec, x)?.ric_mu, &m.ricci_mu_at(x)?));
        // truth drift is ∇ log ρ = g⁻¹ d log ρ
        let p = spec.point(x)?;
        let dpsi = nalgebra::DVector::from_vec(m.truth_log_rho.jet(layout, &p, 1)?.gradient());
        let grad = &truth_cometric * dpsi;
        dev.drift_z = dev.drift_z.max(max_abs_diff_slice(&recover_drift(&spec, x)?, grad.as_slice()));
    }
    if points.len() > 1 {
        let base = &points[0];
        let report = recover_log_density(&spec, base, &points[1..])?;
        let log_base = m.log_rho_at(base)?;
        for (t, got) in points[1..].iter().zip(&report.log_rho) {
            dev.log_rho = dev.log_rho.max((got - (m.log_rho_at(t)? - log_base)).abs());
        }
    }
    let within = dev.max() <= tol;
    let out = Output {
        catalog: &m.name,
        samples: points.len(),
        seed: o.seed.unwrap_or(0),
        tolerance: tol,
        deviations: dev,
        within_tolerance: within,
    };
    emit(o.out.as_deref(), &to_json(&out))?;
    Ok(within)
}
