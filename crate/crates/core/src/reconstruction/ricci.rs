use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::Result;
use crate::generator::GeneratorSpec;
use crate::jet::{monomial_probe, Jet, MultiIndex};
use crate::oracle::WEIGHTED_HESSIAN_SIGN;

use super::{recover_christoffels_intrinsic, recover_metric};

/// Bakry–Émery Ricci tensor recovered from Γ₂.
#[derive(Clone, Debug, PartialEq)]
pub struct RicciPoint {
    pub ric_mu: DMatrix<f64>,
    /// `s` in `Ric_μ = Ric_g + s ∇² log ρ`.
    pub convention_sign: f64,
}

/// Order-3 probes `f_i` at `x` with `∇f_i(x) = ∂_i` and vanishing covariant
/// Hessian: `df_i = g(∂_i, ·)` and `∂_a ∂_b f_i = Γ^k_ab ∂_k f_i`.
pub fn ricci_probes(spec: &GeneratorSpec, x: &[f64]) -> Result<Vec<Jet>> {
    let n = spec.dim();
    let p = spec.point(x)?;
    let metric = recover_metric(spec, x)?.metric;
    let conn = recover_christoffels_intrinsic(spec, x)?.connection;
    (0..n)
        .map(|i| {
            let df: Vec<f64> = (0..n).map(|k| metric[(k, i)]).collect();
            let mut f = monomial_probe(spec.layout(), p.clone(), &df, 3)?;
            for a in 0..n {
                for b in a..n {
                    let h: f64 = (0..n).map(|k| conn.get(k, a, b) * df[k]).sum();
                    f.set_deriv(&MultiIndex::pair(n, a, b), h)?;
                }
            }
            Ok(f)
        })
        .collect()
}

/// `Ric_μ(∂_i, ∂_j) = Γ₂(f_i, f_j)(x)` on the probes of [`ricci_probes`].
pub fn recover_ricci_mu(spec: &GeneratorSpec, x: &[f64]) -> Result<RicciPoint> {
    let n = spec.dim();
    let probes = ricci_probes(spec, x)?;
    let mut ric = DMatrix::zeros(n, n);
    for i in 0..n {
        ric[(i, i)] = spec.gamma2(&probes[i])?;
        for j in 0..i {
            let v = spec.gamma2_polarized(&probes[i], &probes[j])?;
            ric[(i, j)] = v;
            ric[(j, i)] = v;
        }
    }
    Ok(RicciPoint {
        ric_mu: ric,
        convention_sign: WEIGHTED_HESSIAN_SIGN,
    })
}
