//! Truncated multivariate Taylor jets.
//!
//! A [`Jet`] of order `K` at a base point stores every partial derivative
//! `∂^α f(x)` with `|α| ≤ K`. Entries are raw partial derivatives, not Taylor
//! coefficients, so the product carries the binomial factors of the
//! generalized Leibniz rule
//!
//! ```text
//! ∂^γ (f g) = Σ_{β ≤ γ} binom(γ, β) ∂^β f ∂^{γ-β} g
//! ```
//!
//! Storage is dense in graded-lexicographic order. Because the order is
//! graded, the entries of a jet of order `k` are a prefix of the entries of
//! a jet of order `K > k`, so one [`JetLayout`] per dimension serves every
//! order up to [`MAX_ORDER`].

use alloc::{format, sync::Arc, vec, vec::Vec};
use core::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Highest supported jet order.
pub const MAX_ORDER: usize = 4;

/// Exponent vector `α` of a partial derivative `∂^α`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    pub fn new(exponents: Vec<u8>) -> Self {
        Self(exponents)
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    /// `e_i`, the index of the first partial `∂_i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Self(e)
    }

    /// Index of the second partial `∂_i ∂_j`.
    pub fn pair(dim: usize, i: usize, j: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] += 1;
        e[j] += 1;
        Self(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }
}

impl From<&[u8]> for MultiIndex {
    fn from(e: &[u8]) -> Self {
        Self(e.to_vec())
    }
}

#[derive(Clone, Copy, Debug)]
struct ProductTerm {
    lhs: u16,
    rhs: u16,
    out: u16,
    coeff: f64,
}

/// Multi-index bookkeeping shared by all jets of one dimension.
#[derive(Debug)]
pub struct JetLayout {
    dim: usize,
    indices: Vec<MultiIndex>,
    /// `counts[k]` = number of multi-indices with degree ≤ k.
    counts: Vec<usize>,
    /// Leibniz terms sorted by output position.
    products: Vec<ProductTerm>,
    /// `product_end[k]` = number of leading terms whose output degree ≤ k.
    product_end: Vec<usize>,
    /// `shifts[i][a]` = position of `α_a + e_i`, defined for `|α_a| < MAX_ORDER`.
    shifts: Vec<Vec<u16>>,
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// All exponent vectors of `dim` entries with the given total degree, in
/// lexicographically decreasing order (`x1` varies slowest).
fn exponents_of_degree(dim: usize, degree: usize, out: &mut Vec<MultiIndex>) {
    fn rec(prefix: &mut Vec<u8>, remaining_dims: usize, remaining: usize, out: &mut Vec<MultiIndex>) {
        if remaining_dims == 1 {
            prefix.push(remaining as u8);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=remaining).rev() {
            prefix.push(e as u8);
            rec(prefix, remaining_dims - 1, remaining - e, out);
            prefix.pop();
        }
    }
    rec(&mut Vec::with_capacity(dim), dim, degree, out);
}

impl JetLayout {
    /// Builds the layout for `dim` variables up to [`MAX_ORDER`].
    pub fn new(dim: usize) -> Arc<Self> {
        assert!((1..=9).contains(&dim), "jet dimension must be in 1..=9");
        let mut indices = Vec::new();
        let mut counts = Vec::with_capacity(MAX_ORDER + 1);
        for d in 0..=MAX_ORDER {
            exponents_of_degree(dim, d, &mut indices);
            counts.push(indices.len());
        }
        debug_assert_eq!(indices.len(), binomial(dim + MAX_ORDER, MAX_ORDER));

        let position = |e: &[u8]| -> Option<usize> { indices.iter().position(|m| m.0 == e) };

        let mut products = Vec::new();
        let mut product_end = Vec::with_capacity(MAX_ORDER + 1);
        for (out, gamma) in indices.iter().enumerate() {
            for (lhs, beta) in indices.iter().enumerate() {
                if !beta.0.iter().zip(&gamma.0).all(|(b, g)| b <= g) {
                    continue;
                }
                let rest: Vec<u8> = gamma.0.iter().zip(&beta.0).map(|(g, b)| g - b).collect();
                let rhs = position(&rest).expect("complement is a valid multi-index");
                let coeff = gamma
                    .0
                    .iter()
                    .zip(&beta.0)
                    .map(|(&g, &b)| binomial(g as usize, b as usize) as f64)
                    .product();
                products.push(ProductTerm {
                    lhs: lhs as u16,
                    rhs: rhs as u16,
                    out: out as u16,
                    coeff,
                });
            }
            if counts.contains(&(out + 1)) {
                product_end.push(products.len());
            }
        }

        let shifts = (0..dim)
            .map(|i| {
                indices[..counts[MAX_ORDER - 1]]
                    .iter()
                    .map(|m| {
                        let mut e = m.0.clone();
                        e[i] += 1;
                        position(&e).expect("shifted index within max order") as u16
                    })
                    .collect()
            })
            .collect();

        Arc::new(Self {
            dim,
            indices,
            counts,
            products,
            product_end,
            shifts,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored derivatives for a jet of the given order: `C(n+K, K)`.
    pub fn len(&self, order: usize) -> usize {
        self.counts[order]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Multi-indices of a jet of the given order, in storage order.
    pub fn indices(&self, order: usize) -> &[MultiIndex] {
        &self.indices[..self.counts[order]]
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        if alpha.dim() != self.dim || alpha.degree() > MAX_ORDER {
            return None;
        }
        self.indices.iter().position(|m| m == alpha)
    }
}

/// Smooth scalar functions that jets can be composed with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum UnivariateFn {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Tanh,
    PowConst(f64),
    Recip,
}

impl UnivariateFn {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Exp => "exp",
            Self::Log => "log",
            Self::Sqrt => "sqrt",
            Self::Tanh => "tanh",
            Self::PowConst(_) => "pow",
            Self::Recip => "recip",
        }
    }

    /// `[φ(x), φ'(x), …, φ^(order)(x)]`.
    pub fn derivatives(&self, x: f64, order: usize) -> Result<Vec<f64>> {
        let domain = || Error::Domain {
            func: self.name(),
            value: x,
        };
        let mut d = Vec::with_capacity(order + 1);
        match *self {
            Self::Sin | Self::Cos => {
                let (s, c) = (libm::sin(x), libm::cos(x));
                let cycle = [s, c, -s, -c];
                let shift = if *self == Self::Sin { 0 } else { 1 };
                d.extend((0..=order).map(|k| cycle[(k + shift) % 4]));
            }
            Self::Exp => {
                let e = libm::exp(x);
                d.resize(order + 1, e);
            }
            Self::Log => {
                if x <= 0.0 {
                    return Err(domain());
                }
                d.push(libm::log(x));
                let mut fact = 1.0;
                for k in 1..=order {
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    d.push(sign * fact / libm::pow(x, k as f64));
                    fact *= k as f64;
                }
            }
            Self::Sqrt => {
                if x < 0.0 || (x == 0.0 && order > 0) {
                    return Err(domain());
                }
                return Self::PowConst(0.5).derivatives(x, order);
            }
            Self::PowConst(p) => {
                let integral = libm::trunc(p) == p;
                if x < 0.0 && !integral || x == 0.0 && (p < 0.0 || !integral && order as f64 > p) {
                    return Err(domain());
                }
                let mut falling = 1.0;
                for k in 0..=order {
                    let e = p - k as f64;
                    let v = if falling == 0.0 { 0.0 } else { falling * libm::pow(x, e) };
                    d.push(v);
                    falling *= e;
                }
            }
            Self::Recip => {
                if x == 0.0 {
                    return Err(domain());
                }
                let mut fact = 1.0;
                for k in 0..=order {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    d.push(sign * fact / libm::pow(x, (k + 1) as f64));
                    fact *= (k + 1) as f64;
                }
            }
            Self::Tanh => {
                // d^k/dx^k tanh = P_k(tanh x) with P_{k+1}(t) = P_k'(t) (1 - t²)
                let t = libm::tanh(x);
                let mut poly = vec![0.0, 1.0];
                for _ in 0..=order {
                    d.push(poly.iter().rev().fold(0.0, |acc, &c| acc * t + c));
                    let deriv: Vec<f64> = poly
                        .iter()
                        .enumerate()
                        .skip(1)
                        .map(|(i, &c)| c * i as f64)
                        .collect();
                    let mut next = vec![0.0; deriv.len() + 2];
                    for (i, &c) in deriv.iter().enumerate() {
                        next[i] += c;
                        next[i + 2] -= c;
                    }
                    poly = next;
                }
            }
        }
        Ok(d)
    }
}

/// Truncated Taylor data of a smooth function at a point.
#[derive(Clone)]
pub struct Jet {
    layout: Arc<JetLayout>,
    order: usize,
    point: Arc<[f64]>,
    derivs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order)
            .field("point", &self.point)
            .field("derivs", &self.derivs)
            .finish()
    }
}

impl Jet {
    pub fn from_derivs(
        layout: &Arc<JetLayout>,
        order: usize,
        point: Arc<[f64]>,
        derivs: Vec<f64>,
    ) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::OrderTooHigh(order));
        }
        if point.len() != layout.dim || derivs.len() != layout.len(order) {
            return Err(Error::Shape(format!(
                "jet of dim {} order {order} needs {} derivatives at a {}-point, got {} at a {}-point",
                layout.dim,
                layout.len(order),
                layout.dim,
                derivs.len(),
                point.len()
            )));
        }
        Ok(Self {
            layout: layout.clone(),
            order,
            point,
            derivs,
        })
    }

    pub fn from_fn(
        layout: &Arc<JetLayout>,
        order: usize,
        point: Arc<[f64]>,
        mut f: impl FnMut(&MultiIndex) -> f64,
    ) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::OrderTooHigh(order));
        }
        let derivs = layout.indices(order).iter().map(&mut f).collect();
        Self::from_derivs(layout, order, point, derivs)
    }

    pub fn constant(layout: &Arc<JetLayout>, order: usize, point: Arc<[f64]>, c: f64) -> Result<Self> {
        let mut derivs = vec![0.0; layout.len(order.min(MAX_ORDER))];
        derivs[0] = c;
        Self::from_derivs(layout, order, point, derivs)
    }

    /// Jet of the coordinate function `x ↦ x_i`.
    pub fn coordinate(layout: &Arc<JetLayout>, order: usize, point: Arc<[f64]>, i: usize) -> Result<Self> {
        if i >= layout.dim {
            return Err(Error::VariableOutOfRange {
                index: i + 1,
                dim: layout.dim,
            });
        }
        let value = point.get(i).copied().unwrap_or(0.0);
        let mut jet = Self::constant(layout, order, point, value)?;
        if order >= 1 {
            jet.derivs[1 + i] = 1.0;
        }
        Ok(jet)
    }

    /// Jet of the same shape as `self` with constant value `c`.
    pub fn constant_like(&self, c: f64) -> Self {
        let mut derivs = vec![0.0; self.derivs.len()];
        derivs[0] = c;
        Self {
            derivs,
            ..self.clone()
        }
    }

    pub fn zero_like(&self) -> Self {
        self.constant_like(0.0)
    }

    pub fn layout(&self) -> &Arc<JetLayout> {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn point(&self) -> &Arc<[f64]> {
        &self.point
    }

    pub fn derivs(&self) -> &[f64] {
        &self.derivs
    }

    pub fn derivs_mut(&mut self) -> &mut [f64] {
        &mut self.derivs
    }

    pub fn value(&self) -> f64 {
        self.derivs[0]
    }

    /// `∂^α f(x)`; `None` if `|α|` exceeds the jet order.
    pub fn deriv(&self, alpha: &MultiIndex) -> Option<f64> {
        if alpha.degree() > self.order {
            return None;
        }
        self.layout.position(alpha).map(|p| self.derivs[p])
    }

    /// Overwrites `∂^α f(x)`.
    pub fn set_deriv(&mut self, alpha: &MultiIndex, value: f64) -> Result<()> {
        match self.layout.position(alpha) {
            Some(p) if alpha.degree() <= self.order => {
                self.derivs[p] = value;
                Ok(())
            }
            _ => Err(Error::Shape(format!("multi-index {:?} outside a jet of order {}", alpha.exponents(), self.order))),
        }
    }

    /// Coordinate gradient `(∂_i f)`. Requires order ≥ 1.
    pub fn gradient(&self) -> Vec<f64> {
        assert!(self.order >= 1, "gradient of an order-0 jet");
        self.derivs[1..=self.dim()].to_vec()
    }

    /// Coordinate Hessian `(∂_i ∂_j f)`. Requires order ≥ 2.
    pub fn hessian(&self) -> DMatrix<f64> {
        assert!(self.order >= 2, "hessian of a jet of order < 2");
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.derivs[self.layout.shifts[j][1 + i] as usize])
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.layout.dim != other.layout.dim {
            return Err(Error::Shape(format!("jet dimensions {} and {}", self.dim(), other.dim())));
        }
        if self.order != other.order {
            return Err(Error::Shape(format!("jet orders {} and {}", self.order, other.order)));
        }
        if !Arc::ptr_eq(&self.point, &other.point) && self.point[..] != other.point[..] {
            return Err(Error::Shape("jets at different base points".into()));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.derivs.iter_mut().zip(&other.derivs).for_each(|(a, b)| *a += b);
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.derivs.iter_mut().zip(&other.derivs).for_each(|(a, b)| *a -= b);
        Ok(out)
    }

    /// Truncated product (generalized Leibniz rule).
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut derivs = vec![0.0; self.derivs.len()];
        for t in &self.layout.products[..self.layout.product_end[self.order]] {
            derivs[t.out as usize] += t.coeff * self.derivs[t.lhs as usize] * other.derivs[t.rhs as usize];
        }
        Ok(Self {
            derivs,
            ..self.clone()
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.recip()?)
    }

    /// `self + c * other`, in place.
    pub fn axpy(&mut self, c: f64, other: &Self) -> Result<()> {
        self.check_compatible(other)?;
        self.derivs.iter_mut().zip(&other.derivs).for_each(|(a, b)| *a += c * b);
        Ok(())
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.derivs.iter_mut().for_each(|a| *a *= c);
        out
    }

    pub fn add_constant(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.derivs[0] += c;
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    /// `∂_i f` as a jet of order one lower.
    pub fn partial(&self, i: usize) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::OrderTooLow { got: 0, need: 1 });
        }
        if i >= self.dim() {
            return Err(Error::VariableOutOfRange {
                index: i + 1,
                dim: self.dim(),
            });
        }
        let order = self.order - 1;
        let derivs = self.layout.shifts[i][..self.layout.len(order)]
            .iter()
            .map(|&p| self.derivs[p as usize])
            .collect();
        Ok(Self {
            layout: self.layout.clone(),
            order,
            point: self.point.clone(),
            derivs,
        })
    }

    /// Drops all derivatives above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Self {
            layout: self.layout.clone(),
            order,
            point: self.point.clone(),
            derivs: self.derivs[..self.layout.len(order)].to_vec(),
        }
    }

    /// `φ ∘ f`, exact to the jet order.
    pub fn compose(&self, phi: UnivariateFn) -> Result<Self> {
        let d = phi.derivatives(self.value(), self.order)?;
        // φ(f0 + h) = Σ φ^(k)(f0) h^k / k!, and h^k vanishes below degree k.
        let mut h = self.clone();
        h.derivs[0] = 0.0;
        let mut result = self.constant_like(d[0]);
        let mut power = self.constant_like(1.0);
        let mut factorial = 1.0;
        for (k, dk) in d.iter().enumerate().skip(1) {
            power = power.checked_mul(&h)?;
            factorial *= k as f64;
            result.axpy(dk / factorial, &power)?;
        }
        Ok(result)
    }

    pub fn recip(&self) -> Result<Self> {
        self.compose(UnivariateFn::Recip)
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, exponent: i32) -> Result<Self> {
        let mut result = self.constant_like(1.0);
        let mut base = self.clone();
        let mut e = exponent.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = result.checked_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        if exponent < 0 {
            result.recip()
        } else {
            Ok(result)
        }
    }
}

/// Jet of the affine function `y ↦ Σ v_i (y_i − x_i)`.
pub fn monomial_probe(layout: &Arc<JetLayout>, x: Arc<[f64]>, v: &[f64], order: usize) -> Result<Jet> {
    if v.len() != layout.dim() {
        return Err(Error::Shape(format!("probe direction of length {} in dimension {}", v.len(), layout.dim())));
    }
    if order < 2 {
        return Err(Error::OrderTooLow { got: order, need: 2 });
    }
    let mut jet = Jet::constant(layout, order, x, 0.0)?;
    jet.derivs[1..=layout.dim()].copy_from_slice(v);
    Ok(jet)
}

/// Matrix whose entries are jets at a common point and order.
#[derive(Clone, Debug)]
pub struct JetMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Jet>,
}

impl JetMatrix {
    /// Row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<Jet>) -> Result<Self> {
        if entries.len() != rows * cols || entries.is_empty() {
            return Err(Error::Shape(format!("{} entries for a {rows}x{cols} jet matrix", entries.len())));
        }
        for e in &entries[1..] {
            entries[0].check_compatible(e)?;
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Result<Jet>) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j)?);
            }
        }
        Self::new(rows, cols, entries)
    }

    pub fn identity(template: &Jet, n: usize) -> Self {
        let entries = (0..n * n)
            .map(|k| template.constant_like(if k / n == k % n { 1.0 } else { 0.0 }))
            .collect();
        Self { rows: n, cols: n, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn order(&self) -> usize {
        self.entries[0].order
    }

    pub fn get(&self, i: usize, j: usize) -> &Jet {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Jet] {
        &self.entries
    }

    pub fn map(&self, f: impl FnMut(&Jet) -> Jet) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map(|j| j.truncate(order))
    }

    /// Order-0 part as a plain matrix.
    pub fn value(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).value())
    }

    /// Matrix of a single derivative `∂^α` of every entry.
    pub fn deriv(&self, alpha: &MultiIndex) -> Option<DMatrix<f64>> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self.get(i, j).deriv(alpha)?;
            }
        }
        Some(m)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "jet matrix product {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = self.get(i, 0).checked_mul(other.get(0, j))?;
            for k in 1..self.cols {
                acc = acc.checked_add(&self.get(i, k).checked_mul(other.get(k, j))?)?;
            }
            Ok(acc)
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Shape("jet matrix difference of unequal shapes".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entries, ..*self })
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|j| j.scale(c))
    }

    /// Inverse exact to the jet order: invert the value part, then refine by
    /// Newton steps `N ← N (2I − M N)`, each of which doubles the number of
    /// correct orders.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Shape(format!("inverse of a {}x{} jet matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        let value = self.value();
        let singular = value.clone().svd(false, false).singular_values;
        let min_sv = singular.iter().copied().fold(f64::INFINITY, f64::min);
        let max_sv = singular.iter().copied().fold(0.0, f64::max);
        if !(min_sv > 1e-14 * max_sv.max(f64::MIN_POSITIVE)) {
            return Err(Error::Singular {
                min_singular_value: min_sv,
            });
        }
        let inv0 = value.try_inverse().ok_or(Error::Singular {
            min_singular_value: min_sv,
        })?;
        let template = &self.entries[0];
        let mut inv = Self::from_fn(n, n, |i, j| Ok(template.constant_like(inv0[(i, j)])))?;
        let two_identity = Self::identity(template, n).scale(2.0);
        let mut exact_to = 0;
        while exact_to < self.order() {
            let residual = two_identity.checked_sub(&self.checked_mul(&inv)?)?;
            inv = inv.checked_mul(&residual)?;
            exact_to = 2 * exact_to + 1;
        }
        Ok(inv)
    }
}
