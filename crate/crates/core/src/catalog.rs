//! Ground-truth manifolds.
//!
//! Each entry pairs a generator with closed-form metric, Christoffel, Ricci
//! and log-density fields. The closed forms were derived symbolically by
//! `tools/derive_catalog.py` and are frozen in `fixtures/catalog_truth.rs`.
// the fixture writes π and 2π as decimals
#![allow(clippy::approx_constant)]

use alloc::{string::String, vec::Vec};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr, ScalarField, SymmetricField, VectorField};
use crate::generator::{GeneratorSpec, WeightedForm};
use crate::oracle::MetricFieldJets;
use crate::reconstruction::ChartBox;
use crate::tensor::ConnectionPoint;

type Grid = &'static [&'static [&'static str]];

pub(crate) struct TruthRecord {
    name: &'static str,
    chart: &'static str,
    notes: &'static str,
    dim: usize,
    cometric: Grid,
    drift: &'static [&'static str],
    metric: Grid,
    log_rho: &'static str,
    christoffels: &'static [&'static str],
    ricci: Grid,
    ricci_mu: Grid,
    box_lo: &'static [f64],
    box_hi: &'static [f64],
}

include!("../fixtures/catalog_truth.rs");

/// Names accepted by [`get_manifold`].
pub const MANIFOLD_NAMES: [&str; 8] = [
    "euclidean2",
    "euclidean3",
    "sphere2_spherical",
    "sphere2_stereographic",
    "hyperbolic_halfplane",
    "ou_gaussian1",
    "ou_gaussian2",
    "torus_conformal",
];

/// Chart change from `sphere2_spherical` to `sphere2_stereographic`
/// (projection from the north pole): `r = cot(θ/2)`.
pub const SPHERICAL_TO_STEREOGRAPHIC: [&str; 2] = ["cos(x1/2)/sin(x1/2)*cos(x2)", "cos(x1/2)/sin(x1/2)*sin(x2)"];

#[derive(Clone, Debug)]
pub struct ManifoldTruth {
    pub name: String,
    /// Generator with the weighted form `(truth_metric, truth_log_rho)` attached.
    pub spec: GeneratorSpec,
    pub truth_metric: SymmetricField,
    /// `Γ^k_ij`, flattened `(k n + i) n + j`.
    pub truth_christoffels: Vec<Expr>,
    /// Riemannian `Ric_g`.
    pub truth_ricci: SymmetricField,
    /// `Ric_g − ∇² log ρ`.
    pub truth_ricci_mu: SymmetricField,
    pub truth_log_rho: ScalarField,
    pub sample_box: ChartBox,
    pub notes: String,
}

fn grid_field(rows: Grid) -> Result<SymmetricField> {
    let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
    SymmetricField::parse_rows(&rows)
}

impl ManifoldTruth {
    fn from_record(r: &TruthRecord) -> Result<Self> {
        let n = r.dim;
        let truth_metric = grid_field(r.metric)?;
        let truth_log_rho = ScalarField::parse(r.log_rho, n)?;
        let spec = GeneratorSpec::new(
            grid_field(r.cometric)?,
            VectorField::parse(r.drift, n)?,
            r.chart,
            Some(WeightedForm {
                metric: truth_metric.clone(),
                log_density: truth_log_rho.clone(),
            }),
        )?;
        Ok(Self {
            name: r.name.into(),
            spec,
            truth_metric,
            truth_christoffels: r
                .christoffels
                .iter()
                .map(|s| parse_expr(s, n))
                .collect::<Result<Vec<_>>>()?,
            truth_ricci: grid_field(r.ricci)?,
            truth_ricci_mu: grid_field(r.ricci_mu)?,
            truth_log_rho,
            sample_box: ChartBox::new(r.box_lo.to_vec(), r.box_hi.to_vec())?,
            notes: r.notes.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn metric_at(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.truth_metric.eval(x)
    }

    pub fn christoffels_at(&self, x: &[f64]) -> Result<ConnectionPoint> {
        let n = self.dim();
        let values = self
            .truth_christoffels
            .iter()
            .map(|e| e.eval(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(ConnectionPoint::from_fn(n, |k, i, j| values[(k * n + i) * n + j]))
    }

    pub fn ricci_at(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.truth_ricci.eval(x)
    }

    pub fn ricci_mu_at(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.truth_ricci_mu.eval(x)
    }

    pub fn log_rho_at(&self, x: &[f64]) -> Result<f64> {
        self.truth_log_rho.eval(x)
    }

    /// Point at fraction `u ∈ [0,1]^n` of the sample box.
    pub fn sample_point(&self, u: &[f64]) -> Vec<f64> {
        self.sample_box.lerp(u)
    }

    /// Largest deviation at `x` between the spec's coefficients and those
    /// regenerated from the truth fields, `G = g⁻¹` and
    /// `b^j = g^{jk} ∂_k log ρ − g^{ik} Γ^j_ik`.
    pub fn regeneration_residual(&self, x: &[f64]) -> Result<f64> {
        let n = self.dim();
        let p = self.spec.point(x)?;
        let layout = self.spec.layout();
        let g = MetricFieldJets::from_metric(self.truth_metric.jets(layout, &p, 1)?)?;
        let ginv = g.inverse().value();
        let chris = crate::oracle::christoffels_classical(&g)?;
        let dpsi = self.truth_log_rho.jet(layout, &p, 1)?.gradient();
        let cometric = self.spec.cometric.eval(x)?;
        let drift = self.spec.drift.eval(x)?;
        let mut worst = crate::tensor::max_abs_diff(&cometric, &ginv);
        for j in 0..n {
            let mut b = 0.0;
            for k in 0..n {
                b += ginv[(j, k)] * dpsi[k];
                for i in 0..n {
                    b -= ginv[(i, k)] * chris.get(j, i, k);
                }
            }
            worst = worst.max(libm::fabs(b - drift[j]));
        }
        Ok(worst)
    }
}

/// Catalog entry by name.
pub fn get_manifold(name: &str) -> Result<ManifoldTruth> {
    RECORDS
        .iter()
        .find(|r| r.name == name)
        .ok_or_else(|| Error::UnknownManifold(name.into()))
        .and_then(ManifoldTruth::from_record)
}

/// Every catalog entry, in [`MANIFOLD_NAMES`] order.
pub fn all_manifolds() -> Result<Vec<ManifoldTruth>> {
    MANIFOLD_NAMES.iter().map(|n| get_manifold(n)).collect()
}

/// The spherical-to-stereographic chart change as a coefficient map.
pub fn sphere_chart_change() -> Result<VectorField> {
    VectorField::parse(&SPHERICAL_TO_STEREOGRAPHIC, 2)
}
