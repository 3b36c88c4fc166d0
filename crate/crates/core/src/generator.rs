//! Diffusion generators in coefficient form and their Γ-calculus.
//!
//! `L f = G^{ij} ∂_i ∂_j f + b^i ∂_i f`, with `G` the co-metric and `b` the
//! drift. Γ is evaluated by the coordinate contraction
//! `Γ(f, g) = G^{ij} ∂_i f ∂_j g`; the product-rule combination
//! `½ (L(fg) − f Lg − g Lf)` is kept as [`GeneratorSpec::gamma_via_generator`]
//! so the two can be checked against each other.

use alloc::{format, string::String, sync::Arc, vec::Vec};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::{ScalarField, SymmetricField, VectorField};
use crate::jet::{Jet, JetLayout, JetMatrix};

/// Co-metric value matrices with a smaller minimum eigenvalue are rejected.
pub const SPD_THRESHOLD: f64 = 1e-10;

/// The weighted-manifold data `(g, log ρ)` a generator was derived from.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedForm {
    pub metric: SymmetricField,
    pub log_density: ScalarField,
}

#[derive(Clone, Debug)]
pub struct GeneratorSpec {
    dim: usize,
    pub cometric: SymmetricField,
    pub drift: VectorField,
    pub chart: String,
    pub weighted_form: Option<WeightedForm>,
    layout: Arc<JetLayout>,
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

impl GeneratorSpec {
    pub fn new(
        cometric: SymmetricField,
        drift: VectorField,
        chart: impl Into<String>,
        weighted_form: Option<WeightedForm>,
    ) -> Result<Self> {
        let dim = cometric.dim;
        if drift.len() != dim {
            return Err(Error::Shape(format!("drift has {} components in dimension {dim}", drift.len())));
        }
        if let Some(w) = &weighted_form {
            if w.metric.dim != dim || w.log_density.dim != dim {
                return Err(Error::Shape("weighted form dimension differs from the co-metric".into()));
            }
        }
        Ok(Self {
            dim,
            cometric,
            drift,
            chart: chart.into(),
            weighted_form,
            layout: JetLayout::new(dim),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn layout(&self) -> &Arc<JetLayout> {
        &self.layout
    }

    pub fn point(&self, x: &[f64]) -> Result<Arc<[f64]>> {
        if x.len() != self.dim {
            return Err(Error::Shape(format!("{}-point for a {}-dimensional spec", x.len(), self.dim)));
        }
        Ok(Arc::from(x))
    }

    /// Jet of the coordinate function `x^i` at `x`.
    pub fn coordinate(&self, x: &Arc<[f64]>, i: usize, order: usize) -> Result<Jet> {
        Jet::coordinate(&self.layout, order, x.clone(), i)
    }

    /// Co-metric jets at `x`; fails if the value part is not positive definite.
    pub fn cometric_jets(&self, x: &Arc<[f64]>, order: usize) -> Result<JetMatrix> {
        let jets = self.cometric.jets(&self.layout, x, order)?;
        let min_eig = min_eigenvalue(&jets.value());
        if !(min_eig > SPD_THRESHOLD) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: min_eig });
        }
        Ok(jets)
    }

    pub fn drift_jets(&self, x: &Arc<[f64]>, order: usize) -> Result<Vec<Jet>> {
        self.drift.jets(&self.layout, x, order)
    }

    /// `L f` as a jet of order `f.order() − 2`.
    pub fn apply_l(&self, f: &Jet) -> Result<Jet> {
        if f.order() < 2 {
            return Err(Error::OrderTooLow { got: f.order(), need: 2 });
        }
        self.check_dim(f)?;
        let m = f.order() - 2;
        let x = f.point();
        let cometric = self.cometric_jets(x, m)?;
        let drift = self.drift_jets(x, m)?;
        let mut out = f.truncate(m).zero_like();
        for i in 0..self.dim {
            let di = f.partial(i)?;
            out = out.checked_add(&drift[i].checked_mul(&di.truncate(m))?)?;
            for j in 0..self.dim {
                let dij = di.partial(j)?;
                out = out.checked_add(&cometric.get(i, j).checked_mul(&dij)?)?;
            }
        }
        Ok(out)
    }

    /// `Γ(f, g) = G^{ij} ∂_i f ∂_j g` as a jet of order `min(f, g) − 1`.
    pub fn gamma(&self, f: &Jet, g: &Jet) -> Result<Jet> {
        let order = f.order().min(g.order());
        if order < 1 {
            return Err(Error::OrderTooLow { got: order, need: 1 });
        }
        self.check_dim(f)?;
        self.check_dim(g)?;
        // fixed operand order makes Γ(f, g) and Γ(g, f) bitwise identical
        let (f, g) = if canonical_first(f, g) { (f, g) } else { (g, f) };
        let m = order - 1;
        let cometric = self.cometric_jets(f.point(), m)?;
        let df = (0..self.dim)
            .map(|i| Ok(f.partial(i)?.truncate(m)))
            .collect::<Result<Vec<_>>>()?;
        let dg = (0..self.dim)
            .map(|j| Ok(g.partial(j)?.truncate(m)))
            .collect::<Result<Vec<_>>>()?;
        let mut out = df[0].zero_like();
        for i in 0..self.dim {
            for j in 0..self.dim {
                out = out.checked_add(&cometric.get(i, j).checked_mul(&df[i])?.checked_mul(&dg[j])?)?;
            }
        }
        Ok(out)
    }

    /// [`Self::gamma`] with co-metric jets supplied by the caller; `cometric`
    /// must have order at least `min(f, g) − 1`.
    pub(crate) fn gamma_with(&self, cometric: &JetMatrix, f: &Jet, g: &Jet) -> Result<Jet> {
        let order = f.order().min(g.order());
        if order < 1 {
            return Err(Error::OrderTooLow { got: order, need: 1 });
        }
        let m = order - 1;
        let mut out = f.truncate(m).zero_like();
        for i in 0..self.dim {
            let dfi = f.partial(i)?.truncate(m);
            let mut inner = out.zero_like();
            for j in 0..self.dim {
                inner.axpy(1.0, &cometric.get(i, j).truncate(m).checked_mul(&g.partial(j)?.truncate(m))?)?;
            }
            out.axpy(1.0, &dfi.checked_mul(&inner)?)?;
        }
        Ok(out)
    }

    /// All pairwise `Γ(f_a, f_b)` for jets sharing one base point and order,
    /// with a single co-metric evaluation.
    pub fn gamma_matrix(&self, fs: &[Jet]) -> Result<JetMatrix> {
        let first = fs.first().ok_or_else(|| Error::Shape("gamma matrix of no functions".into()))?;
        if first.order() < 1 {
            return Err(Error::OrderTooLow { got: first.order(), need: 1 });
        }
        let m = first.order() - 1;
        let cometric = self.cometric_jets(first.point(), m)?;
        let grads = fs
            .iter()
            .map(|f| {
                self.check_dim(f)?;
                (0..self.dim).map(|i| Ok(f.partial(i)?.truncate(m))).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        // G ∂f_b, reused across rows
        let raised = grads
            .iter()
            .map(|db| {
                (0..self.dim)
                    .map(|i| {
                        let mut acc = db[0].zero_like();
                        for (j, dbj) in db.iter().enumerate() {
                            acc = acc.checked_add(&cometric.get(i, j).checked_mul(dbj)?)?;
                        }
                        Ok(acc)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let k = fs.len();
        let mut entries: Vec<Option<Jet>> = (0..k * k).map(|_| None).collect();
        for a in 0..k {
            for b in a..k {
                let mut acc = grads[a][0].zero_like();
                for i in 0..self.dim {
                    acc = acc.checked_add(&grads[a][i].checked_mul(&raised[b][i])?)?;
                }
                entries[b * k + a] = Some(acc.clone());
                entries[a * k + b] = Some(acc);
            }
        }
        JetMatrix::new(k, k, entries.into_iter().map(|e| e.expect("filled")).collect())
    }

    /// `½ (L(fg) − f Lg − g Lf)`, of order `min(f, g) − 2`.
    pub fn gamma_via_generator(&self, f: &Jet, g: &Jet) -> Result<Jet> {
        let order = f.order().min(g.order());
        if order < 2 {
            return Err(Error::OrderTooLow { got: order, need: 2 });
        }
        let (f, g) = (f.truncate(order), g.truncate(order));
        let m = order - 2;
        let l_fg = self.apply_l(&f.checked_mul(&g)?)?;
        let f_lg = f.truncate(m).checked_mul(&self.apply_l(&g)?)?;
        let g_lf = g.truncate(m).checked_mul(&self.apply_l(&f)?)?;
        Ok(l_fg.checked_sub(&f_lg)?.checked_sub(&g_lf)?.scale(0.5))
    }

    /// `Γ₂(f) = ½ L Γ(f) − Γ(f, L f)` at the base point.
    pub fn gamma2(&self, f: &Jet) -> Result<f64> {
        if f.order() < 3 {
            return Err(Error::OrderTooLow { got: f.order(), need: 3 });
        }
        let gamma_ff = self.gamma(f, f)?;
        let l_gamma = self.apply_l(&gamma_ff)?;
        let lf = self.apply_l(f)?;
        let gamma_f_lf = self.gamma(f, &lf)?;
        Ok(0.5 * l_gamma.value() - gamma_f_lf.value())
    }

    /// `Γ₂(f, g) = ¼ (Γ₂(f + g) − Γ₂(f − g))`.
    pub fn gamma2_polarized(&self, f: &Jet, g: &Jet) -> Result<f64> {
        let order = f.order().min(g.order());
        let (f, g) = (f.truncate(order), g.truncate(order));
        let plus = self.gamma2(&f.checked_add(&g)?)?;
        let minus = self.gamma2(&f.checked_sub(&g)?)?;
        Ok(0.25 * (plus - minus))
    }

    fn check_dim(&self, f: &Jet) -> Result<()> {
        if f.dim() != self.dim {
            return Err(Error::Shape(format!("{}-dimensional jet for a {}-dimensional spec", f.dim(), self.dim)));
        }
        Ok(())
    }
}

fn canonical_first(f: &Jet, g: &Jet) -> bool {
    for (a, b) in f.derivs().iter().zip(g.derivs()) {
        match a.total_cmp(b) {
            core::cmp::Ordering::Equal => continue,
            o => return o == core::cmp::Ordering::Less,
        }
    }
    f.order() <= g.order()
}

/// `|Γ(Φ∘F, g) − Σ_a (∂_a Φ)(F) Γ(f_a, g)|` at the base point.
///
/// `composed` is the jet of `Φ∘F` and `phi_grad[a]` holds `(∂_a Φ)(F(x))`.
pub fn chain_rule_residual(
    spec: &GeneratorSpec,
    phi_grad: &[f64],
    components: &[Jet],
    composed: &Jet,
    g: &Jet,
) -> Result<f64> {
    if phi_grad.len() != components.len() {
        return Err(Error::Shape(format!(
            "{} partials of Φ for {} component functions",
            phi_grad.len(),
            components.len()
        )));
    }
    let lhs = spec.gamma(composed, g)?.value();
    let mut rhs = 0.0;
    for (dphi, fa) in phi_grad.iter().zip(components) {
        rhs += dphi * spec.gamma(fa, g)?.value();
    }
    Ok(libm::fabs(lhs - rhs))
}
