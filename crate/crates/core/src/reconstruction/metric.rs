use alloc::{sync::Arc, vec::Vec};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::generator::{min_eigenvalue, GeneratorSpec, SPD_THRESHOLD};
use crate::jet::JetMatrix;

/// Co-metric and metric recovered at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricPoint {
    pub point: Vec<f64>,
    /// `G^ij = Γ(x^i, x^j)`.
    pub cometric: DMatrix<f64>,
    /// `g_ij`, the inverse of the co-metric.
    pub metric: DMatrix<f64>,
    pub min_eigenvalue: f64,
}

/// Jets of `G^ij = Γ(x^i, x^j)` of the given order.
pub fn recovered_cometric_jets(spec: &GeneratorSpec, x: &Arc<[f64]>, order: usize) -> Result<JetMatrix> {
    let coords = (0..spec.dim())
        .map(|i| spec.coordinate(x, i, order + 1))
        .collect::<Result<Vec<_>>>()?;
    spec.gamma_matrix(&coords)
}

/// `G^ij(x) = Γ(x^i, x^j)(x)`.
pub fn recover_cometric(spec: &GeneratorSpec, x: &[f64]) -> Result<DMatrix<f64>> {
    let p = spec.point(x)?;
    Ok(recovered_cometric_jets(spec, &p, 0)?.value())
}

/// Recovers `g_ij` by a Cholesky inverse of the recovered co-metric.
pub fn recover_metric(spec: &GeneratorSpec, x: &[f64]) -> Result<MetricPoint> {
    let cometric = recover_cometric(spec, x)?;
    let min_eig = min_eigenvalue(&cometric);
    if !(min_eig > SPD_THRESHOLD) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min_eig });
    }
    let metric = cometric
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite { min_eigenvalue: min_eig })?
        .inverse();
    Ok(MetricPoint {
        point: x.to_vec(),
        cometric,
        metric,
        min_eigenvalue: min_eig,
    })
}
