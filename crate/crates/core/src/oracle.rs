//! Classical differential geometry from metric jets.
//!
//! Everything here is computed from `g_ij` and its partial derivatives (and,
//! for the weighted quantities, from `log ρ`), never from Γ. It is the
//! reference the Γ-based reconstruction is checked against.
//!
//! Riemann convention:
//! `R^l_ijk = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik`, so that
//! `R(∂_i, ∂_j) ∂_k = R^l_ijk ∂_l` and `Ric_jk = R^i_ijk`. With this choice
//! the unit sphere has sectional curvature `+1`.

use alloc::{format, vec::Vec};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::generator::GeneratorSpec;
use crate::jet::{Jet, JetMatrix, MultiIndex};
use crate::tensor::ConnectionPoint;

/// Sign `s` in `Ric_μ = Ric_g + s ∇² log ρ` for `L = Δ_g + ⟨∇ log ρ, ∇·⟩`.
///
/// Established by [`resolve_bochner_sign`] on the Ornstein–Uhlenbeck
/// generator, where only `s = −1` satisfies the Bochner identity.
pub const WEIGHTED_HESSIAN_SIGN: f64 = -1.0;

/// Jets of `g_ij` and `g^ij` at one point.
#[derive(Clone, Debug)]
pub struct MetricFieldJets {
    metric: JetMatrix,
    inverse: JetMatrix,
}

impl MetricFieldJets {
    pub fn from_metric(metric: JetMatrix) -> Result<Self> {
        let n = metric.rows();
        for i in 0..n {
            for j in i + 1..n {
                let d = crate::tensor::max_abs_diff_slice(metric.get(i, j).derivs(), metric.get(j, i).derivs());
                if d > 1e-12 {
                    return Err(Error::Shape(format!("metric jets not symmetric (defect {d:e})")));
                }
            }
        }
        let inverse = metric.inverse()?;
        Ok(Self { metric, inverse })
    }

    pub fn from_cometric(cometric: JetMatrix) -> Result<Self> {
        let metric = cometric.inverse()?;
        Ok(Self {
            metric,
            inverse: cometric,
        })
    }

    /// Metric jets from the spec's declared weighted form when present,
    /// otherwise from the inverse of its co-metric coefficients.
    pub fn from_spec(spec: &GeneratorSpec, x: &[f64], order: usize) -> Result<Self> {
        let x = spec.point(x)?;
        match &spec.weighted_form {
            Some(w) => Self::from_metric(w.metric.jets(spec.layout(), &x, order)?),
            None => Self::from_cometric(spec.cometric_jets(&x, order)?),
        }
    }

    pub fn dim(&self) -> usize {
        self.metric.rows()
    }

    pub fn order(&self) -> usize {
        self.metric.order()
    }

    pub fn metric(&self) -> &JetMatrix {
        &self.metric
    }

    pub fn inverse(&self) -> &JetMatrix {
        &self.inverse
    }

    /// `Γ^k_ij` as jets of order `K − 1`, flattened as `(k n + i) n + j`.
    pub fn christoffel_jets(&self) -> Result<Vec<Jet>> {
        let n = self.dim();
        let k_order = self.order();
        if k_order < 1 {
            return Err(Error::OrderTooLow { got: k_order, need: 1 });
        }
        let m = k_order - 1;
        // dg[(l n + i) n + j] = ∂_l g_ij
        let mut dg = Vec::with_capacity(n * n * n);
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    dg.push(self.metric.get(i, j).partial(l)?);
                }
            }
        }
        let d = |l: usize, i: usize, j: usize| &dg[(l * n + i) * n + j];
        let ginv = self.inverse.truncate(m);
        let mut out = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = ginv.get(0, 0).zero_like();
                    for l in 0..n {
                        let koszul = d(i, j, l).checked_add(d(j, i, l))?.checked_sub(d(l, i, j))?;
                        acc = acc.checked_add(&ginv.get(k, l).checked_mul(&koszul)?)?;
                    }
                    out.push(acc.scale(0.5));
                }
            }
        }
        Ok(out)
    }
}

/// `Γ^k_ij = ½ g^{kl} (∂_i g_jl + ∂_j g_il − ∂_l g_ij)`.
pub fn christoffels_classical(g: &MetricFieldJets) -> Result<ConnectionPoint> {
    let n = g.dim();
    let jets = g.christoffel_jets()?;
    Ok(ConnectionPoint::from_fn(n, |k, i, j| jets[(k * n + i) * n + j].value()))
}

/// Riemann tensor components `R^l_ijk` at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct RiemannPoint {
    dim: usize,
    components: Vec<f64>,
}

impl RiemannPoint {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `R^l_ijk`.
    pub fn get(&self, l: usize, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim;
        self.components[((l * n + i) * n + j) * n + k]
    }

    /// Largest `|R^l_ijk + R^l_jik|`.
    pub fn antisymmetry_defect(&self) -> f64 {
        self.max_over(|r, l, i, j, k| r.get(l, i, j, k) + r.get(l, j, i, k))
    }

    /// Largest `|R^l_ijk + R^l_jki + R^l_kij|`.
    pub fn bianchi_defect(&self) -> f64 {
        self.max_over(|r, l, i, j, k| r.get(l, i, j, k) + r.get(l, j, k, i) + r.get(l, k, i, j))
    }

    fn max_over(&self, f: impl Fn(&Self, usize, usize, usize, usize) -> f64) -> f64 {
        let n = self.dim;
        let mut m: f64 = 0.0;
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        m = m.max(libm::fabs(f(self, l, i, j, k)));
                    }
                }
            }
        }
        m
    }

    /// Sectional curvature of the `(∂_1, ∂_2)` plane:
    /// `⟨R(∂_1, ∂_2) ∂_2, ∂_1⟩ / det g` (two-dimensional charts).
    pub fn sectional_curvature(&self, metric: &DMatrix<f64>) -> f64 {
        let r1212: f64 = (0..self.dim).map(|l| metric[(0, l)] * self.get(l, 0, 1, 1)).sum();
        let det = metric[(0, 0)] * metric[(1, 1)] - metric[(0, 1)] * metric[(1, 0)];
        r1212 / det
    }
}

/// Riemann tensor from metric jets of order ≥ 2.
pub fn riemann_tensor(g: &MetricFieldJets) -> Result<RiemannPoint> {
    if g.order() < 2 {
        return Err(Error::OrderTooLow { got: g.order(), need: 2 });
    }
    let n = g.dim();
    let gamma = g.christoffel_jets()?;
    let c = |k: usize, i: usize, j: usize| gamma[(k * n + i) * n + j].value();
    let dc = |d: usize, k: usize, i: usize, j: usize| -> Result<f64> {
        Ok(gamma[(k * n + i) * n + j].partial(d)?.value())
    };
    let mut components = Vec::with_capacity(n * n * n * n);
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut r = dc(i, l, j, k)? - dc(j, l, i, k)?;
                    for m in 0..n {
                        r += c(l, i, m) * c(m, j, k) - c(l, j, m) * c(m, i, k);
                    }
                    components.push(r);
                }
            }
        }
    }
    Ok(RiemannPoint { dim: n, components })
}

/// `Ric_jk = R^i_ijk`.
pub fn ricci_from_riemann(r: &RiemannPoint) -> DMatrix<f64> {
    let n = r.dim;
    DMatrix::from_fn(n, n, |j, k| (0..n).map(|i| r.get(i, i, j, k)).sum())
}

/// `(∇²f)_ij = ∂_i ∂_j f − Γ^k_ij ∂_k f`.
pub fn covariant_hessian(f: &Jet, conn: &ConnectionPoint) -> Result<DMatrix<f64>> {
    if f.order() < 2 {
        return Err(Error::OrderTooLow { got: f.order(), need: 2 });
    }
    let n = f.dim();
    let grad = f.gradient();
    let mut h = f.hessian();
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] -= (0..n).map(|k| conn.get(k, i, j) * grad[k]).sum::<f64>();
        }
    }
    Ok(h)
}

/// `‖A‖²_{HS,g} = g^{ia} g^{jb} A_ij A_ab`.
pub fn hilbert_schmidt_sq(a: &DMatrix<f64>, ginv: &DMatrix<f64>) -> f64 {
    let raised = ginv * a * ginv;
    a.component_mul(&raised).sum()
}

/// `Δ_g f + ⟨∇ log ρ, ∇f⟩_g`.
pub fn weighted_laplacian(g: &MetricFieldJets, log_rho: &Jet, f: &Jet) -> Result<f64> {
    let conn = christoffels_classical(g)?;
    let hess = covariant_hessian(f, &conn)?;
    let ginv = g.inverse().value();
    let grad_f = f.gradient();
    let grad_r = log_rho.gradient();
    let n = g.dim();
    let mut out = 0.0;
    for i in 0..n {
        for j in 0..n {
            out += ginv[(i, j)] * (hess[(i, j)] + grad_r[i] * grad_f[j]);
        }
    }
    Ok(out)
}

/// Metric and log-density jets at one point: the classical side of the
/// weighted Bochner identity.
#[derive(Clone, Debug)]
pub struct WeightedOracle {
    metric: MetricFieldJets,
    log_density: Jet,
    connection: ConnectionPoint,
    ricci: DMatrix<f64>,
}

impl WeightedOracle {
    /// `metric` needs order ≥ 2 and `log_density` order ≥ 2.
    pub fn new(metric: MetricFieldJets, log_density: Jet) -> Result<Self> {
        if log_density.order() < 2 {
            return Err(Error::OrderTooLow {
                got: log_density.order(),
                need: 2,
            });
        }
        let connection = christoffels_classical(&metric)?;
        let ricci = ricci_from_riemann(&riemann_tensor(&metric)?);
        Ok(Self {
            metric,
            log_density,
            connection,
            ricci,
        })
    }

    /// Reads the spec's declared weighted form at `x`.
    pub fn from_weighted_form(spec: &GeneratorSpec, x: &[f64]) -> Result<Self> {
        let w = spec
            .weighted_form
            .as_ref()
            .ok_or_else(|| Error::Unsupported("bochner oracle needs a weighted form".into()))?;
        let p = spec.point(x)?;
        let metric = MetricFieldJets::from_metric(w.metric.jets(spec.layout(), &p, 2)?)?;
        let log_density = w.log_density.jet(spec.layout(), &p, 2)?;
        Self::new(metric, log_density)
    }

    pub fn metric(&self) -> &MetricFieldJets {
        &self.metric
    }

    pub fn connection(&self) -> &ConnectionPoint {
        &self.connection
    }

    /// `Ric_g`.
    pub fn ricci(&self) -> &DMatrix<f64> {
        &self.ricci
    }

    /// Covariant Hessian of `log ρ`.
    pub fn log_density_hessian(&self) -> Result<DMatrix<f64>> {
        covariant_hessian(&self.log_density, &self.connection)
    }

    /// `Ric_g + sign ∇² log ρ`.
    pub fn bakry_emery_ricci(&self, sign: f64) -> Result<DMatrix<f64>> {
        Ok(&self.ricci + self.log_density_hessian()? * sign)
    }

    /// `|Γ₂(f) − ‖∇²f‖²_{HS,g} − (Ric_g + sign ∇² log ρ)(∇f, ∇f)|`.
    pub fn bochner_residual(&self, spec: &GeneratorSpec, f: &Jet, sign: f64) -> Result<f64> {
        let gamma2 = spec.gamma2(f)?;
        let hess = covariant_hessian(f, &self.connection)?;
        let ginv = self.metric.inverse().value();
        let hs = hilbert_schmidt_sq(&hess, &ginv);
        let ric = self.bakry_emery_ricci(sign)?;
        // ∇f = g^{-1} df, and Ric(∇f, ∇f) = df^T g^{-1} Ric g^{-1} df.
        let df = nalgebra::DVector::from_vec(f.gradient());
        let grad = &ginv * &df;
        let ric_term = grad.dot(&(&ric * &grad));
        Ok(libm::fabs(gamma2 - hs - ric_term))
    }
}

/// Bochner residual at `f`'s base point, using the spec's declared weighted form.
pub fn bochner_residual(spec: &GeneratorSpec, f: &Jet, sign: f64) -> Result<f64> {
    WeightedOracle::from_weighted_form(spec, f.point())?.bochner_residual(spec, f, sign)
}

/// Outcome of testing both signs of the `∇² log ρ` term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignResolution {
    /// The sign whose residuals all fall within tolerance.
    pub sign: f64,
    pub max_residual_plus: f64,
    pub max_residual_minus: f64,
}

/// Largest Bochner residuals over `probes` with the `∇² log ρ` term taken
/// with sign `+1` and `−1`.
pub fn bochner_sign_residuals(spec: &GeneratorSpec, probes: &[Jet]) -> Result<(f64, f64)> {
    let mut plus: f64 = 0.0;
    let mut minus: f64 = 0.0;
    for f in probes {
        let oracle = crate::reconstruction::reference_oracle(spec, f.point())?;
        plus = plus.max(oracle.bochner_residual(spec, f, 1.0)?);
        minus = minus.max(oracle.bochner_residual(spec, f, -1.0)?);
    }
    Ok((plus, minus))
}

/// Picks the sign of the `∇² log ρ` term for which the Bochner identity holds
/// on every probe. Fails unless exactly one sign fits within `tol`. Specs
/// without a weighted form are compared against the recovered density.
pub fn resolve_bochner_sign(spec: &GeneratorSpec, probes: &[Jet], tol: f64) -> Result<SignResolution> {
    let (plus, minus) = bochner_sign_residuals(spec, probes)?;
    let sign = match (plus <= tol, minus <= tol) {
        (true, false) => 1.0,
        (false, true) => -1.0,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "bochner sign not discriminated: residual {plus:e} for +1, {minus:e} for -1"
            )))
        }
    };
    Ok(SignResolution {
        sign,
        max_residual_plus: plus,
        max_residual_minus: minus,
    })
}

/// Second-order jet of a function with prescribed gradient and Hessian.
pub(crate) fn quadratic_jet(template: &Jet, grad: &[f64], hess: &DMatrix<f64>) -> Result<Jet> {
    let n = template.dim();
    let mut j = Jet::constant(template.layout(), 2, template.point().clone(), 0.0)?;
    for i in 0..n {
        j.set_deriv(&MultiIndex::unit(n, i), grad[i])?;
        for k in i..n {
            j.set_deriv(&MultiIndex::pair(n, i, k), 0.5 * (hess[(i, k)] + hess[(k, i)]))?;
        }
    }
    Ok(j)
}
