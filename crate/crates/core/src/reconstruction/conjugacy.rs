//! Generator-level conjugacy: does `Φ` intertwine the Γ-structures, pull the
//! metric back, and match the reference measures up to a constant?

use alloc::{format, vec::Vec};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::VectorField;
use crate::generator::GeneratorSpec;
use crate::tensor::max_abs_diff;

use super::{recover_cometric, recover_log_density, recover_metric};

/// Smallest admissible `|det J_Φ|`.
const MIN_JACOBIAN: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ConjugacyReport {
    pub samples: Vec<Vec<f64>>,
    /// Per sample, `max |Γ_A(Φ^a, Φ^b) − Γ_B(y^a, y^b)∘Φ|`.
    pub gamma_residuals: Vec<f64>,
    /// Per sample, `max |g_A − J_Φᵀ (g_B∘Φ) J_Φ|`.
    pub metric_pullback_residuals: Vec<f64>,
    /// `max − min` over samples of `log ρ_A − log ρ_B∘Φ`; absent when either
    /// side has no invariant density.
    pub measure_ratio_variation: Option<f64>,
}

impl ConjugacyReport {
    pub fn max_gamma_residual(&self) -> f64 {
        self.gamma_residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_metric_residual(&self) -> f64 {
        self.metric_pullback_residuals.iter().copied().fold(0.0, f64::max)
    }

    /// All residuals, the measure variation included when present, at most `tol`.
    pub fn is_isometry(&self, tol: f64) -> bool {
        self.max_gamma_residual() <= tol
            && self.max_metric_residual() <= tol
            && self.measure_ratio_variation.is_none_or(|v| v <= tol)
    }
}

/// Tests `Φ: A → B` at each sample of `A`'s chart.
pub fn check_conjugacy(
    spec_a: &GeneratorSpec,
    spec_b: &GeneratorSpec,
    phi: &VectorField,
    samples: &[Vec<f64>],
) -> Result<ConjugacyReport> {
    let n = spec_a.dim();
    if spec_b.dim() != n || phi.len() != n || phi.dim != n {
        return Err(Error::Shape(format!(
            "conjugacy between dimensions {n} and {} via a {}-component map",
            spec_b.dim(),
            phi.len()
        )));
    }
    let mut gamma_residuals = Vec::with_capacity(samples.len());
    let mut metric_residuals = Vec::with_capacity(samples.len());
    let mut images = Vec::with_capacity(samples.len());
    for x in samples {
        let p = spec_a.point(x)?;
        let comps = phi.jets(spec_a.layout(), &p, 1)?;
        let y: Vec<f64> = comps.iter().map(|c| c.value()).collect();
        let jac = DMatrix::from_fn(n, n, |a, i| comps[a].gradient()[i]);
        let det = jac.determinant();
        if !(libm::fabs(det) > MIN_JACOBIAN) {
            return Err(Error::Singular {
                min_singular_value: jac.singular_values().min(),
            });
        }
        let pushed = spec_a.gamma_matrix(&comps)?.value();
        gamma_residuals.push(max_abs_diff(&pushed, &recover_cometric(spec_b, &y)?));
        let g_a = recover_metric(spec_a, x)?.metric;
        let g_b = recover_metric(spec_b, &y)?.metric;
        metric_residuals.push(max_abs_diff(&g_a, &(jac.transpose() * g_b * &jac)));
        images.push(y);
    }
    let measure_ratio_variation = match samples.first() {
        None => Some(0.0),
        Some(base) => match (
            recover_log_density(spec_a, base, samples),
            recover_log_density(spec_b, &images[0], &images),
        ) {
            (Ok(a), Ok(b)) => {
                let diffs: Vec<f64> = a.log_rho.iter().zip(&b.log_rho).map(|(a, b)| a - b).collect();
                let lo = diffs.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                Some(hi - lo)
            }
            (Err(Error::NoInvariantDensity { .. }), _) | (_, Err(Error::NoInvariantDensity { .. })) => None,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        },
    };
    Ok(ConjugacyReport {
        samples: samples.to_vec(),
        gamma_residuals,
        metric_pullback_residuals: metric_residuals,
        measure_ratio_variation,
    })
}
