//! Levi-Civita connection from the intrinsic Koszul identity
//!
//! ```text
//! ∇²h(∇f, ∇g) = ½ (Γ(f, Γ(g,h)) + Γ(g, Γ(f,h)) − Γ(h, Γ(f,g)))
//! ```
//!
//! On coordinates `(f, g, h) = (x^i, x^j, x^m)` the left side is
//! `⟨∇_{∇x^i} ∇x^m, ∇x^j⟩ = g^{ip} ∂_p g^{mj} + g^{ip} g^{mq} Γ^j_pq`. The first
//! term is itself `Γ(x^i, G^{mj})`; subtracting it leaves, for each upper
//! index `j`, the system `G C^{(j)} G = B^{(j)}` in the unknowns
//! `C^{(j)}_pq = Γ^j_pq`.

use alloc::{sync::Arc, vec::Vec};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::generator::GeneratorSpec;
use crate::jet::{Jet, JetMatrix};
use crate::tensor::ConnectionPoint;

use super::metric::recovered_cometric_jets;

/// Condition numbers of the Koszul solve above this are rejected.
const MAX_CONDITION: f64 = 1e14;

#[derive(Clone, Debug, PartialEq)]
pub struct IntrinsicConnection {
    /// Symmetrized Christoffel symbols.
    pub connection: ConnectionPoint,
    /// Largest `|Γ^k_ij − Γ^k_ji|` of the raw solve.
    pub raw_asymmetry: f64,
    /// Condition number of the linear map `C ↦ G C G`.
    pub condition: f64,
}

/// Right-hand sides `B^{(j)}_{im}` as jets of order `order`, flattened
/// `(j n + i) n + m`, together with the recovered co-metric jets of that order.
fn koszul_systems(spec: &GeneratorSpec, x: &Arc<[f64]>, order: usize) -> Result<(JetMatrix, Vec<Jet>)> {
    let n = spec.dim();
    let coords = (0..n)
        .map(|i| spec.coordinate(x, i, order + 2))
        .collect::<Result<Vec<_>>>()?;
    let cometric = recovered_cometric_jets(spec, x, order + 1)?;
    let coefficients = spec.cometric_jets(x, order)?;
    // d[(i n + j) n + m] = Γ(x^i, Γ(x^j, x^m))
    let mut d = Vec::with_capacity(n * n * n);
    for ci in &coords {
        for j in 0..n {
            for m in 0..n {
                d.push(spec.gamma_with(&coefficients, ci, cometric.get(j, m))?);
            }
        }
    }
    let d = |i: usize, j: usize, m: usize| &d[(i * n + j) * n + m];
    let mut rhs = Vec::with_capacity(n * n * n);
    for j in 0..n {
        for i in 0..n {
            for m in 0..n {
                let koszul = d(i, j, m).checked_add(d(j, i, m))?.checked_sub(d(m, i, j))?.scale(0.5);
                rhs.push(koszul.checked_sub(d(i, m, j))?);
            }
        }
    }
    Ok((cometric.truncate(order), rhs))
}

/// Christoffel symbols at `x` from Γ alone.
pub fn recover_christoffels_intrinsic(spec: &GeneratorSpec, x: &[f64]) -> Result<IntrinsicConnection> {
    let n = spec.dim();
    let p = spec.point(x)?;
    let (cometric, rhs) = koszul_systems(spec, &p, 0)?;
    let g_inv = cometric.value();
    let eig = g_inv.clone().symmetric_eigenvalues();
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    if !(lo > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: lo });
    }
    let condition = (hi / lo) * (hi / lo);
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let chol = g_inv.cholesky().ok_or(Error::NotPositiveDefinite { min_eigenvalue: lo })?;
    let mut raw = ConnectionPoint::zeros(n);
    for j in 0..n {
        let b = DMatrix::from_fn(n, n, |i, m| rhs[(j * n + i) * n + m].value());
        // C = G⁻¹ B G⁻¹
        let left = chol.solve(&b);
        let c = chol.solve(&left.transpose()).transpose();
        for a in 0..n {
            for b in 0..n {
                raw.set(j, a, b, c[(a, b)]);
            }
        }
    }
    let raw_asymmetry = raw.torsion();
    let connection = ConnectionPoint::from_fn(n, |k, i, j| 0.5 * (raw.get(k, i, j) + raw.get(k, j, i)));
    Ok(IntrinsicConnection {
        connection,
        raw_asymmetry,
        condition,
    })
}

/// Christoffel symbols as jets of the given order, flattened `(k n + i) n + j`,
/// together with the recovered co-metric jets of that order.
pub fn intrinsic_christoffel_jets(spec: &GeneratorSpec, x: &Arc<[f64]>, order: usize) -> Result<(JetMatrix, Vec<Jet>)> {
    let n = spec.dim();
    let (cometric, rhs) = koszul_systems(spec, x, order)?;
    let metric = cometric.inverse()?;
    let mut out = Vec::with_capacity(n * n * n);
    for k in 0..n {
        let b = JetMatrix::new(n, n, rhs[k * n * n..(k + 1) * n * n].to_vec())?;
        let c = metric.checked_mul(&b)?.checked_mul(&metric)?;
        for i in 0..n {
            for j in 0..n {
                out.push(c.get(i, j).checked_add(c.get(j, i))?.scale(0.5));
            }
        }
    }
    Ok((cometric, out))
}
