//! Drift `Z = L − Δ_g` and the log-density `ψ = log ρ` with `Z = ∇ψ`.

use alloc::{sync::Arc, vec, vec::Vec};

use crate::error::{Error, Result};
use crate::generator::GeneratorSpec;
use crate::jet::Jet;
use crate::oracle::quadratic_jet;
use crate::quadrature::composite_unit;

use super::connection::intrinsic_christoffel_jets;

/// Largest admissible `|∂_i Z♭_j − ∂_j Z♭_i|` for a symmetric generator.
pub const CLOSEDNESS_TOLERANCE: f64 = 1e-6;

const GL_POINTS: usize = 16;
const GL_SEGMENTS: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport {
    pub base: Vec<f64>,
    pub targets: Vec<Vec<f64>>,
    /// `log ρ(target) − log ρ(base)` per target.
    pub log_rho: Vec<f64>,
    /// `Z^k` at each target.
    pub drift_z: Vec<Vec<f64>>,
    /// Largest `|∂_i Z♭_j − ∂_j Z♭_i|` sampled along the straight paths.
    pub one_form_closedness: f64,
    /// Largest gap between straight and axis-parallel integrals.
    pub path_independence_residual: f64,
}

/// Contravariant drift jets `Z^j = L x^j − Δ_g x^j = L x^j + G^{ik} Γ^j_ik`
/// and the lowered `Z♭_k = g_kj Z^j`, both of the given order.
fn drift_jets(spec: &GeneratorSpec, x: &Arc<[f64]>, order: usize) -> Result<(Vec<Jet>, Vec<Jet>)> {
    let n = spec.dim();
    let (cometric, chris) = intrinsic_christoffel_jets(spec, x, order)?;
    let mut z = Vec::with_capacity(n);
    for j in 0..n {
        let mut zj = spec.apply_l(&spec.coordinate(x, j, order + 2)?)?;
        for i in 0..n {
            for k in 0..n {
                zj.axpy(1.0, &cometric.get(i, k).checked_mul(&chris[(j * n + i) * n + k])?)?;
            }
        }
        z.push(zj);
    }
    let metric = cometric.inverse()?;
    let mut flat = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = z[0].zero_like();
        for (j, zj) in z.iter().enumerate() {
            acc.axpy(1.0, &metric.get(k, j).checked_mul(zj)?)?;
        }
        flat.push(acc);
    }
    Ok((z, flat))
}

/// `Z^k(x)`.
pub fn recover_drift(spec: &GeneratorSpec, x: &[f64]) -> Result<Vec<f64>> {
    let p = spec.point(x)?;
    Ok(drift_jets(spec, &p, 0)?.0.iter().map(Jet::value).collect())
}

/// Jets of the lowered drift one-form `Z♭_k`.
pub fn drift_one_form_jets(spec: &GeneratorSpec, x: &[f64], order: usize) -> Result<Vec<Jet>> {
    let p = spec.point(x)?;
    Ok(drift_jets(spec, &p, order)?.1)
}

/// `max |∂_i Z♭_j − ∂_j Z♭_i|` from one-form jets of order ≥ 1.
pub fn one_form_closedness(flat: &[Jet]) -> Result<f64> {
    let n = flat.len();
    let mut m: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let curl = flat[j].partial(i)?.value() - flat[i].partial(j)?.value();
            m = m.max(libm::fabs(curl));
        }
    }
    Ok(m)
}

/// Order-2 jet of `log ρ − log ρ(x)` at `x`: gradient `Z♭`, Hessian the
/// symmetrized `∂_i Z♭_j`.
pub fn log_density_jet(spec: &GeneratorSpec, x: &[f64]) -> Result<Jet> {
    let n = spec.dim();
    let flat = drift_one_form_jets(spec, x, 1)?;
    let closedness = one_form_closedness(&flat)?;
    if closedness > CLOSEDNESS_TOLERANCE {
        return Err(Error::NoInvariantDensity { closedness });
    }
    let grad: Vec<f64> = flat.iter().map(Jet::value).collect();
    let hess = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        0.5 * (flat[j].partial(i).map(|d| d.value()).unwrap_or(0.0) + flat[i].partial(j).map(|d| d.value()).unwrap_or(0.0))
    });
    quadratic_jet(&flat[0], &grad, &hess)
}

fn one_form_at(spec: &GeneratorSpec, x: &[f64]) -> Result<Vec<f64>> {
    Ok(drift_one_form_jets(spec, x, 0)?.iter().map(Jet::value).collect())
}

/// `∫ Z♭` along the straight chart segment `a → b`.
fn segment_integral(spec: &GeneratorSpec, a: &[f64], b: &[f64], rule: &[(f64, f64)]) -> Result<f64> {
    let d: Vec<f64> = b.iter().zip(a).map(|(b, a)| b - a).collect();
    if d.iter().all(|&c| c == 0.0) {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let mut y = vec![0.0; a.len()];
    for &(s, w) in rule {
        for k in 0..a.len() {
            y[k] = a[k] + s * d[k];
        }
        let z = one_form_at(spec, &y)?;
        total += w * z.iter().zip(&d).map(|(z, d)| z * d).sum::<f64>();
    }
    Ok(total)
}

/// `log ρ(target) − log ρ(base)` for each target by line integration of `Z♭`.
///
/// Fails with [`Error::NoInvariantDensity`] when `Z♭` is not closed along
/// any of the paths.
pub fn recover_log_density(spec: &GeneratorSpec, base: &[f64], targets: &[Vec<f64>]) -> Result<DensityReport> {
    spec.point(base)?;
    let rule = composite_unit(GL_POINTS, GL_SEGMENTS);
    let mut closedness: f64 = 0.0;
    let mut path_residual: f64 = 0.0;
    let mut log_rho = Vec::with_capacity(targets.len());
    let mut drift_z = Vec::with_capacity(targets.len());
    for target in targets {
        spec.point(target)?;
        for s in 0..GL_SEGMENTS {
            let t = (s as f64 + 0.5) / GL_SEGMENTS as f64;
            let y: Vec<f64> = base.iter().zip(target).map(|(a, b)| a + t * (b - a)).collect();
            closedness = closedness.max(one_form_closedness(&drift_one_form_jets(spec, &y, 1)?)?);
        }
        if closedness > CLOSEDNESS_TOLERANCE {
            return Err(Error::NoInvariantDensity { closedness });
        }
        let straight = segment_integral(spec, base, target, &rule)?;
        // axis-parallel path: move one coordinate at a time
        let mut corner = base.to_vec();
        let mut stepped = 0.0;
        for k in 0..base.len() {
            let next = {
                let mut c = corner.clone();
                c[k] = target[k];
                c
            };
            stepped += segment_integral(spec, &corner, &next, &rule)?;
            corner = next;
        }
        path_residual = path_residual.max(libm::fabs(straight - stepped));
        log_rho.push(straight);
        drift_z.push(recover_drift(spec, target)?);
    }
    Ok(DensityReport {
        base: base.to_vec(),
        targets: targets.to_vec(),
        log_rho,
        drift_z,
        one_form_closedness: closedness,
        path_independence_residual: path_residual,
    })
}
