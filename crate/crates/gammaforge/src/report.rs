//! JSON shapes of the reports.

use gammaforge_core::reconstruction::{ConjugacyReport, GeometryReport};
use gammaforge_core::tensor::to_rows;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticsJson {
    pub min_eig: f64,
    pub koszul_crosscheck: f64,
    pub bochner_residual: f64,
    pub ricci_crosscheck: f64,
    pub raw_asymmetry: f64,
    pub koszul_condition: f64,
    pub one_form_closedness: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportJson {
    pub point: Vec<f64>,
    pub cometric: Vec<Vec<f64>>,
    pub metric: Vec<Vec<f64>>,
    /// `christoffels[k][i][j] = Γ^k_ij`.
    pub christoffels: Vec<Vec<Vec<f64>>>,
    pub ric_mu: Vec<Vec<f64>>,
    #[serde(rename = "drift_Z")]
    pub drift_z: Vec<f64>,
    pub diagnostics: DiagnosticsJson,
}

impl From<&GeometryReport> for ReportJson {
    fn from(r: &GeometryReport) -> Self {
        let d = &r.diagnostics;
        Self {
            point: r.point.clone(),
            cometric: to_rows(&r.cometric),
            metric: to_rows(&r.metric),
            christoffels: r.christoffels.to_nested(),
            ric_mu: to_rows(&r.ric_mu),
            drift_z: r.drift_z.clone(),
            diagnostics: DiagnosticsJson {
                min_eig: d.min_eig,
                koszul_crosscheck: d.koszul_crosscheck,
                bochner_residual: d.bochner_residual,
                ricci_crosscheck: d.ricci_crosscheck,
                raw_asymmetry: d.raw_asymmetry,
                koszul_condition: d.koszul_condition,
                one_form_closedness: d.one_form_closedness,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjugacyJson {
    pub samples: Vec<Vec<f64>>,
    pub gamma_residuals: Vec<f64>,
    pub metric_pullback_residuals: Vec<f64>,
    pub measure_ratio_variation: Option<f64>,
    pub max_gamma_residual: f64,
    pub max_metric_residual: f64,
    pub tolerance: f64,
    /// `isometry` or `non-isometry`.
    pub verdict: &'static str,
}

impl ConjugacyJson {
    pub fn new(r: &ConjugacyReport, tolerance: f64) -> Self {
        Self {
            samples: r.samples.clone(),
            gamma_residuals: r.gamma_residuals.clone(),
            metric_pullback_residuals: r.metric_pullback_residuals.clone(),
            measure_ratio_variation: r.measure_ratio_variation,
            max_gamma_residual: r.max_gamma_residual(),
            max_metric_residual: r.max_metric_residual(),
            tolerance,
            verdict: if r.is_isometry(tolerance) { "isometry" } else { "non-isometry" },
        }
    }
}
