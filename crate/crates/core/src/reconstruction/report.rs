use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::Result;
use crate::generator::GeneratorSpec;
use crate::jet::Jet;
use crate::oracle::{christoffels_classical, MetricFieldJets, WeightedOracle};
use crate::tensor::{max_abs_diff, ConnectionPoint};

use super::{log_density_jet, recover_christoffels_intrinsic, recover_drift, recover_metric, recover_ricci_mu};

/// Cross-checks attached to one reconstructed point.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub min_eig: f64,
    /// `max |Γ^k_ij(intrinsic) − Γ^k_ij(classical)|`.
    pub koszul_crosscheck: f64,
    /// Largest Bochner residual over the supplied probes.
    pub bochner_residual: f64,
    /// `max |Ric_μ(Γ₂) − (Ric_g + s ∇² log ρ)|`.
    pub ricci_crosscheck: f64,
    /// Pre-symmetrization `|Γ^k_ij − Γ^k_ji|` of the Koszul solve.
    pub raw_asymmetry: f64,
    pub koszul_condition: f64,
    /// `max |∂_i Z♭_j − ∂_j Z♭_i|` at the point.
    pub one_form_closedness: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeometryReport {
    pub point: Vec<f64>,
    pub cometric: DMatrix<f64>,
    pub metric: DMatrix<f64>,
    pub christoffels: ConnectionPoint,
    pub ric_mu: DMatrix<f64>,
    pub drift_z: Vec<f64>,
    /// `s` in `Ric_μ = Ric_g + s ∇² log ρ` used by the oracle comparisons.
    pub convention_sign: f64,
    pub diagnostics: Diagnostics,
}

/// Oracle side of the cross-checks at `x`: the spec's weighted form when
/// present, otherwise the inverse co-metric coefficients with the log-density
/// jet recovered from the drift.
pub fn reference_oracle(spec: &GeneratorSpec, x: &[f64]) -> Result<WeightedOracle> {
    match spec.weighted_form {
        Some(_) => WeightedOracle::from_weighted_form(spec, x),
        None => reference_oracle_with(spec, x, log_density_jet(spec, x)?),
    }
}

fn reference_oracle_with(spec: &GeneratorSpec, x: &[f64], log_density: Jet) -> Result<WeightedOracle> {
    match spec.weighted_form {
        Some(_) => WeightedOracle::from_weighted_form(spec, x),
        None => WeightedOracle::new(MetricFieldJets::from_spec(spec, x, 2)?, log_density),
    }
}

/// Full reconstruction at `x`.
///
/// The oracle side reads the spec's weighted form when present; otherwise it
/// uses the inverse co-metric coefficients and the log-density jet recovered
/// from the drift. `probes` (order ≥ 3, based at `x`) feed the Bochner
/// residual; with none supplied it is reported as zero.
pub fn reconstruct_point(spec: &GeneratorSpec, x: &[f64], probes: &[Jet], sign: f64) -> Result<GeometryReport> {
    let metric = recover_metric(spec, x)?;
    let intrinsic = recover_christoffels_intrinsic(spec, x)?;
    let ricci = recover_ricci_mu(spec, x)?;
    let drift_z = recover_drift(spec, x)?;
    let log_density = log_density_jet(spec, x)?;
    let flat = super::drift_one_form_jets(spec, x, 1)?;
    let closedness = super::one_form_closedness(&flat)?;

    let oracle = reference_oracle_with(spec, x, log_density)?;
    let classical = christoffels_classical(oracle.metric())?;
    let koszul_crosscheck = intrinsic.connection.max_abs_diff(&classical);
    let ricci_crosscheck = max_abs_diff(&ricci.ric_mu, &oracle.bakry_emery_ricci(sign)?);
    let mut bochner: f64 = 0.0;
    for f in probes {
        bochner = bochner.max(oracle.bochner_residual(spec, f, sign)?);
    }
    Ok(GeometryReport {
        point: x.to_vec(),
        cometric: metric.cometric,
        metric: metric.metric,
        christoffels: intrinsic.connection,
        ric_mu: ricci.ric_mu,
        drift_z,
        convention_sign: sign,
        diagnostics: Diagnostics {
            min_eig: metric.min_eigenvalue,
            koszul_crosscheck,
            bochner_residual: bochner,
            ricci_crosscheck,
            raw_asymmetry: intrinsic.raw_asymmetry,
            koszul_condition: intrinsic.condition,
            one_form_closedness: closedness,
        },
    })
}
