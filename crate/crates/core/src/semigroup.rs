//! Heat semigroup on periodic grids.
//!
//! A weighted manifold `(g, ρ)` with diagonal `g` is discretized in
//! divergence form: vertex measures `μ_v` and symmetric nearest-neighbor
//! edge weights `w_e`, with `(L h)_v = μ_v⁻¹ Σ_e w_e (h_u − h_v)`. Symmetry
//! with respect to `μ` and `L 1 = 0` hold by construction. Time stepping is
//! Crank–Nicolson with a direct envelope Cholesky solve.

use alloc::{format, vec, vec::Vec};
use core::ops::{Deref, DerefMut};

use crate::error::{Error, Result};
use crate::expr::{ScalarField, SymmetricField};
use crate::generator::SPD_THRESHOLD;

/// Fewest points per axis.
pub const MIN_POINTS: usize = 16;

/// Posterior values this close to 0 or 1 make the dissipation integrand unusable.
pub const POSTERIOR_FLOOR: f64 = 1e-12;

/// Periodic rectangular grid in one or two dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicGrid {
    shape: Vec<usize>,
    lengths: Vec<f64>,
    origin: Vec<f64>,
}

impl PeriodicGrid {
    pub fn new(shape: Vec<usize>, lengths: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.len() > 2 || shape.len() != lengths.len() {
            return Err(Error::Unsupported(format!(
                "periodic grid with shape {shape:?} and lengths {lengths:?}"
            )));
        }
        if shape.iter().any(|&s| s < MIN_POINTS) {
            return Err(Error::InvalidArgument(format!("grid needs at least {MIN_POINTS} points per axis")));
        }
        if lengths.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidArgument("box lengths must be positive".into()));
        }
        let origin = vec![0.0; shape.len()];
        Ok(Self { shape, lengths, origin })
    }

    /// Moves vertex zero from the coordinate origin to `origin`.
    pub fn with_origin(mut self, origin: Vec<f64>) -> Result<Self> {
        if origin.len() != self.dim() || origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid origin {origin:?}")));
        }
        self.origin = origin;
        Ok(self)
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    /// Circle of circumference `length` with `n` points.
    pub fn circle(n: usize, length: f64) -> Result<Self> {
        Self::new(vec![n], vec![length])
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.shape[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|k| self.spacing(k)).product()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of vertex `v`; the first axis varies fastest.
    pub fn multi_index(&self, mut v: usize) -> Vec<usize> {
        self.shape
            .iter()
            .map(|&s| {
                let i = v % s;
                v /= s;
                i
            })
            .collect()
    }

    pub fn vertex(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.shape)
            .rev()
            .fold(0, |acc, (&i, &s)| acc * s + i % s)
    }

    pub fn coords(&self, v: usize) -> Vec<f64> {
        self.multi_index(v)
            .iter()
            .enumerate()
            .map(|(k, &i)| self.origin[k] + i as f64 * self.spacing(k))
            .collect()
    }

    /// Neighbor of `v` one step forward along `axis`, wrapping around.
    pub fn forward(&self, v: usize, axis: usize) -> usize {
        let mut idx = self.multi_index(v);
        idx[axis] = (idx[axis] + 1) % self.shape[axis];
        self.vertex(&idx)
    }
}

/// One value per grid vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField(pub Vec<f64>);

impl GridField {
    pub fn from_fn(grid: &PeriodicGrid, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        Self((0..grid.len()).map(|v| f(&grid.coords(v))).collect())
    }

    pub fn constant(grid: &PeriodicGrid, c: f64) -> Self {
        Self(vec![c; grid.len()])
    }

    pub fn indicator(set: &[bool]) -> Self {
        Self(set.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| libm::fabs(a - b)).fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl Deref for GridField {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for GridField {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

/// Symmetric divergence-form generator on a periodic grid.
#[derive(Clone, Debug)]
pub struct DiscreteGenerator {
    grid: PeriodicGrid,
    edges: Vec<Edge>,
    measure: Vec<f64>,
}

impl DiscreteGenerator {
    /// Assembles `L = Δ_g + ⟨∇ log ρ, ∇·⟩` with diagonal `g`:
    /// `μ_v = ρ √det g · |cell|` at `v` and, across the edge from `v` to
    /// `v + h_i e_i`, `w = ρ √det g · g^{ii} · |cell| / h_i²` at the midpoint.
    pub fn build(metric: &SymmetricField, log_rho: &ScalarField, grid: PeriodicGrid) -> Result<Self> {
        let n = grid.dim();
        if metric.dim != n || log_rho.dim != n {
            return Err(Error::Shape(format!("{}-dimensional fields on a {n}-dimensional grid", metric.dim)));
        }
        if !metric.is_diagonal() {
            return Err(Error::Unsupported("grid assembly requires a diagonal metric".into()));
        }
        let cell = grid.cell_volume();
        // (ρ √det g, diagonal of g) at a point
        let local = |x: &[f64]| -> Result<(f64, Vec<f64>)> {
            let diag = (0..n).map(|i| metric.get(i, i).eval(x)).collect::<Result<Vec<_>>>()?;
            let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
            if !(min > SPD_THRESHOLD) {
                return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
            }
            let density = libm::exp(log_rho.eval(x)?) * libm::sqrt(diag.iter().product());
            Ok((density, diag))
        };
        let mut measure = Vec::with_capacity(grid.len());
        let mut edges = Vec::with_capacity(n * grid.len());
        for v in 0..grid.len() {
            let x = grid.coords(v);
            measure.push(local(&x)?.0 * cell);
            for axis in 0..n {
                let h = grid.spacing(axis);
                let mut mid = x.clone();
                mid[axis] += 0.5 * h;
                let (density, diag) = local(&mid)?;
                edges.push(Edge {
                    a: v,
                    b: grid.forward(v, axis),
                    weight: density / diag[axis] * cell / (h * h),
                });
            }
        }
        Ok(Self { grid, edges, measure })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Vertex measures `μ_v`.
    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn total_mass(&self) -> f64 {
        self.measure.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.measure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measure.is_empty()
    }

    fn check(&self, f: &GridField) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::Shape(format!("field of {} values on {} vertices", f.len(), self.len())));
        }
        Ok(())
    }

    /// `(L f)_v`.
    pub fn apply(&self, f: &GridField) -> Result<GridField> {
        self.check(f)?;
        let mut out = vec![0.0; self.len()];
        for e in &self.edges {
            let flux = e.weight * (f[e.b] - f[e.a]);
            out[e.a] += flux;
            out[e.b] -= flux;
        }
        for (o, m) in out.iter_mut().zip(&self.measure) {
            *o /= m;
        }
        Ok(GridField(out))
    }

    /// Discrete carré du champ `½ (L(fg) − f Lg − g Lf)`, evaluated edgewise.
    pub fn gamma(&self, f: &GridField, g: &GridField) -> Result<GridField> {
        self.check(f)?;
        self.check(g)?;
        let mut out = vec![0.0; self.len()];
        for e in &self.edges {
            let c = 0.5 * e.weight * (f[e.b] - f[e.a]) * (g[e.b] - g[e.a]);
            out[e.a] += c;
            out[e.b] += c;
        }
        for (o, m) in out.iter_mut().zip(&self.measure) {
            *o /= m;
        }
        Ok(GridField(out))
    }

    /// `½ (L(fg) − f Lg − g Lf)` assembled literally from [`Self::apply`].
    pub fn gamma_via_generator(&self, f: &GridField, g: &GridField) -> Result<GridField> {
        let fg = f.zip_map(g, |a, b| a * b);
        let l_fg = self.apply(&fg)?;
        let lf = self.apply(f)?;
        let lg = self.apply(g)?;
        Ok(GridField(
            (0..self.len())
                .map(|v| 0.5 * (l_fg[v] - f[v] * lg[v] - g[v] * lf[v]))
                .collect(),
        ))
    }

    /// `⟨f, g⟩_μ`.
    pub fn inner(&self, f: &GridField, g: &GridField) -> f64 {
        compensated_sum(f.iter().zip(g.iter()).zip(&self.measure).map(|((a, b), m)| a * b * m))
    }

    /// `∫ f dμ`.
    pub fn integral(&self, f: &GridField) -> f64 {
        compensated_sum(f.iter().zip(&self.measure).map(|(a, m)| a * m))
    }

    /// `|⟨Lf, g⟩_μ − ⟨f, Lg⟩_μ|`.
    pub fn symmetry_defect(&self, f: &GridField, g: &GridField) -> Result<f64> {
        Ok(libm::fabs(self.inner(&self.apply(f)?, g) - self.inner(f, &self.apply(g)?)))
    }

    /// Largest time step for which the Crank–Nicolson map is positivity
    /// preserving, `min_v 2 μ_v / Σ_{e ∋ v} w_e`.
    pub fn positivity_time_step(&self) -> f64 {
        let mut degree = vec![0.0; self.len()];
        for e in &self.edges {
            degree[e.a] += e.weight;
            degree[e.b] += e.weight;
        }
        degree
            .iter()
            .zip(&self.measure)
            .map(|(d, m)| if *d > 0.0 { 2.0 * m / d } else { f64::INFINITY })
            .fold(f64::INFINITY, f64::min)
    }

    /// Crank–Nicolson propagator with a fixed step.
    pub fn heat_flow(&self, dt: f64) -> Result<HeatFlow<'_>> {
        HeatFlow::new(self, dt)
    }
}

/// Neumaier summation.
fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for x in terms {
        let t = sum + x;
        carry += if libm::fabs(sum) >= libm::fabs(x) { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + carry
}

/// Cholesky factor stored row by row over each row's envelope.
#[derive(Clone, Debug)]
struct EnvelopeCholesky {
    first: Vec<usize>,
    start: Vec<usize>,
    values: Vec<f64>,
}

impl EnvelopeCholesky {
    /// Factors the SPD matrix `diag + Σ_e (offdiag coupling)`, given by its
    /// diagonal and symmetric off-diagonal entries `(i, j, a_ij)`.
    fn factor(diag: &[f64], offdiag: &[(usize, usize, f64)]) -> Result<Self> {
        let n = diag.len();
        let mut first: Vec<usize> = (0..n).collect();
        for &(i, j, _) in offdiag {
            let (lo, hi) = if i < j { (i, j) } else { (j, i) };
            first[hi] = first[hi].min(lo);
        }
        let mut start = Vec::with_capacity(n + 1);
        let mut total = 0;
        for (i, f) in first.iter().enumerate() {
            start.push(total);
            total += i - f + 1;
        }
        start.push(total);
        let mut values = vec![0.0; total];
        let at = |first: &[usize], start: &[usize], i: usize, j: usize| start[i] + j - first[i];
        for (i, d) in diag.iter().enumerate() {
            values[at(&first, &start, i, i)] += d;
        }
        for &(i, j, a) in offdiag {
            let (lo, hi) = if i < j { (i, j) } else { (j, i) };
            values[at(&first, &start, hi, lo)] += a;
        }
        for i in 0..n {
            for j in first[i]..=i {
                let k0 = first[i].max(first[j]);
                let mut s = values[at(&first, &start, i, j)];
                for k in k0..j {
                    s -= values[at(&first, &start, i, k)] * values[at(&first, &start, j, k)];
                }
                if j < i {
                    values[at(&first, &start, i, j)] = s / values[at(&first, &start, j, j)];
                } else {
                    if !(s > 0.0) {
                        return Err(Error::NotPositiveDefinite { min_eigenvalue: s });
                    }
                    values[at(&first, &start, i, i)] = libm::sqrt(s);
                }
            }
        }
        Ok(Self { first, start, values })
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.start[i] + j - self.first[i]]
    }

    fn solve_in_place(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n {
            let mut s = b[i];
            for k in self.first[i]..i {
                s -= self.get(i, k) * b[k];
            }
            b[i] = s / self.get(i, i);
        }
        for i in (0..n).rev() {
            b[i] /= self.get(i, i);
            let bi = b[i];
            for k in self.first[i]..i {
                b[k] -= self.get(i, k) * bi;
            }
        }
    }
}

/// Crank–Nicolson stepping `(M + ½dt K) u⁺ = (M − ½dt K) u`, with `M = diag μ`
/// and `K` the weighted graph Laplacian.
#[derive(Clone, Debug)]
pub struct HeatFlow<'g> {
    generator: &'g DiscreteGenerator,
    dt: f64,
    factor: EnvelopeCholesky,
}

impl<'g> HeatFlow<'g> {
    pub fn new(generator: &'g DiscreteGenerator, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("time step {dt}")));
        }
        let mut diag = generator.measure.clone();
        let mut off = Vec::with_capacity(generator.edges.len());
        for e in &generator.edges {
            let c = 0.5 * dt * e.weight;
            diag[e.a] += c;
            diag[e.b] += c;
            off.push((e.a, e.b, -c));
        }
        Ok(Self {
            generator,
            dt,
            factor: EnvelopeCholesky::factor(&diag, &off)?,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step(&self, u: &mut GridField) -> Result<()> {
        let generator = self.generator;
        generator.check(u)?;
        // increment form (M + ½dt K) δ = −dt K u keeps constants exactly fixed
        let mut delta = vec![0.0; u.len()];
        for e in &generator.edges {
            let flux = self.dt * e.weight * (u[e.b] - u[e.a]);
            delta[e.a] += flux;
            delta[e.b] -= flux;
        }
        self.factor.solve_in_place(&mut delta);
        for (x, d) in u.iter_mut().zip(&delta) {
            *x += d;
        }
        Ok(())
    }

    pub fn advance(&self, u: &mut GridField, steps: usize) -> Result<()> {
        for _ in 0..steps {
            self.step(u)?;
        }
        Ok(())
    }
}

/// Number of whole steps of size `dt` in `t`; fails unless `t` is a multiple.
fn step_count(t: f64, dt: f64) -> Result<usize> {
    let k = libm::round(t / dt);
    if !(t >= 0.0) || libm::fabs(k * dt - t) > 1e-9 * t.max(dt) {
        return Err(Error::InvalidArgument(format!("time {t} is not a multiple of the step {dt}")));
    }
    Ok(k as usize)
}

/// `P_t u` by Crank–Nicolson with step `dt`; `t` must be a multiple of `dt`.
pub fn step_heat(generator: &DiscreteGenerator, u: &GridField, t: f64, dt: f64) -> Result<GridField> {
    let steps = step_count(t, dt)?;
    let mut out = u.clone();
    generator.heat_flow(dt)?.advance(&mut out, steps)?;
    Ok(out)
}

/// Crank–Nicolson steps used per time in the Γ-limit quotient.
pub const GAMMA_LIMIT_STEPS: usize = 64;

/// Quotients `Q_t = (P_t(fg) − P_t f · P_t g) / 2t` and their convergence.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaLimit {
    pub times: Vec<f64>,
    pub quotients: Vec<GridField>,
    /// `½ (L(fg) − f Lg − g Lf)`.
    pub formula: GridField,
    /// `‖Q_t − formula‖∞` per time.
    pub sup_error: Vec<f64>,
    /// `sup_error[k] / sup_error[k + 1]`.
    pub ratio: Vec<f64>,
    /// `2 Q_{t/2} − Q_t` on the two smallest times.
    pub extrapolated: GridField,
    /// Set when the errors fail to decrease along the halvings.
    pub non_monotone: bool,
}

/// Γ through the short-time limit of the semigroup.
///
/// `times` must decrease by factors of two and hold at least three values.
pub fn gamma_via_semigroup_limit(
    generator: &DiscreteGenerator,
    f: &GridField,
    g: &GridField,
    times: &[f64],
) -> Result<GammaLimit> {
    if times.len() < 3 {
        return Err(Error::InvalidArgument("Γ limit needs at least three times".into()));
    }
    for w in times.windows(2) {
        if !(w[1] > 0.0) || libm::fabs(w[0] / w[1] - 2.0) > 1e-9 {
            return Err(Error::InvalidArgument("Γ limit times must halve successively".into()));
        }
    }
    let fg = f.zip_map(g, |a, b| a * b);
    let formula = generator.gamma_via_generator(f, g)?;
    let mut quotients = Vec::with_capacity(times.len());
    for &t in times {
        let flow = generator.heat_flow(t / GAMMA_LIMIT_STEPS as f64)?;
        let run = |u: &GridField| -> Result<GridField> {
            let mut u = u.clone();
            flow.advance(&mut u, GAMMA_LIMIT_STEPS)?;
            Ok(u)
        };
        let (p_fg, p_f, p_g) = (run(&fg)?, run(f)?, run(g)?);
        quotients.push(GridField(
            (0..generator.len())
                .map(|v| (p_fg[v] - p_f[v] * p_g[v]) / (2.0 * t))
                .collect(),
        ));
    }
    let sup_error: Vec<f64> = quotients.iter().map(|q| q.sup_distance(&formula)).collect();
    let ratio: Vec<f64> = sup_error.windows(2).map(|w| w[0] / w[1]).collect();
    let non_monotone = sup_error.windows(2).any(|w| w[1] > w[0]);
    let k = quotients.len();
    let extrapolated = quotients[k - 1].zip_map(&quotients[k - 2], |half, full| 2.0 * half - full);
    Ok(GammaLimit {
        times: times.to_vec(),
        quotients,
        formula,
        sup_error,
        ratio,
        extrapolated,
        non_monotone,
    })
}

/// A binary label `B = 1_E(X₀)` observed through `X_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelExperiment {
    pub set: Vec<bool>,
    pub times: Vec<f64>,
}

impl LabelExperiment {
    pub fn new(generator: &DiscreteGenerator, set: Vec<bool>, times: Vec<f64>) -> Result<Self> {
        if set.len() != generator.len() {
            return Err(Error::Shape(format!("label set over {} of {} vertices", set.len(), generator.len())));
        }
        let mass = prior(generator, &set);
        if !(mass > 0.0 && mass < 1.0) {
            return Err(Error::InvalidArgument("label set must have measure strictly between 0 and 1".into()));
        }
        if times.first().is_some_and(|&t| !(t > 0.0)) || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("experiment times must be positive and increasing".into()));
        }
        Ok(Self { set, times })
    }

    /// Label set given by a predicate on vertex coordinates.
    pub fn from_predicate(
        generator: &DiscreteGenerator,
        mut inside: impl FnMut(&[f64]) -> bool,
        times: Vec<f64>,
    ) -> Result<Self> {
        let grid = generator.grid();
        let set = (0..grid.len()).map(|v| inside(&grid.coords(v))).collect();
        Self::new(generator, set, times)
    }
}

/// `μ̄(E)` under the normalized vertex measure.
fn prior(generator: &DiscreteGenerator, set: &[bool]) -> f64 {
    let inside: f64 = set.iter().zip(generator.measure()).filter(|(b, _)| **b).map(|(_, m)| m).sum();
    inside / generator.total_mass()
}

/// Binary entropy in nats, with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q > 0.0 { -q * libm::log(q) } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// `H(B | Y_t) = ∫ h(P_t 1_E) dμ̄` for a posterior field.
pub fn conditional_entropy(generator: &DiscreteGenerator, posterior: &GridField) -> f64 {
    let total = generator.total_mass();
    posterior
        .iter()
        .zip(generator.measure())
        .map(|(&u, m)| m / total * binary_entropy(u.clamp(0.0, 1.0)))
        .sum()
}

/// Posteriors `P_t 1_E` at each experiment time, stepping with the largest
/// step not above `max_dt` that divides each interval.
pub fn posterior_series(generator: &DiscreteGenerator, exp: &LabelExperiment, max_dt: f64) -> Result<Vec<GridField>> {
    let mut u = GridField::indicator(&exp.set);
    let mut now = 0.0;
    let mut out = Vec::with_capacity(exp.times.len());
    let mut cached: Option<HeatFlow<'_>> = None;
    for &t in &exp.times {
        let gap = t - now;
        let steps = libm::ceil(gap / max_dt - 1e-9).max(1.0);
        let dt = gap / steps;
        let reuse = cached.as_ref().is_some_and(|f| libm::fabs(f.dt() - dt) <= 1e-12 * dt);
        if !reuse {
            cached = Some(generator.heat_flow(dt)?);
        }
        cached.as_ref().expect("flow set above").advance(&mut u, steps as usize)?;
        out.push(u.clone());
        now = t;
    }
    Ok(out)
}

/// Default step bound for label experiments: the positivity step, so the
/// discrete posterior stays in `[0, 1]`.
fn experiment_dt(generator: &DiscreteGenerator) -> f64 {
    generator.positivity_time_step()
}

/// `(t, H(B | Y_t))` along the experiment times.
pub fn conditional_entropy_curve(generator: &DiscreteGenerator, exp: &LabelExperiment) -> Result<Vec<(f64, f64)>> {
    let posts = posterior_series(generator, exp, experiment_dt(generator))?;
    Ok(exp
        .times
        .iter()
        .zip(&posts)
        .map(|(&t, u)| (t, conditional_entropy(generator, u)))
        .collect())
}

/// `(t, I(B; Y_t))` with `I = H(B) − H(B | Y_t)`.
pub fn mutual_information_curve(generator: &DiscreteGenerator, exp: &LabelExperiment) -> Result<Vec<(f64, f64)>> {
    let h_b = binary_entropy(prior(generator, &exp.set));
    Ok(conditional_entropy_curve(generator, exp)?
        .into_iter()
        .map(|(t, h)| (t, h_b - h))
        .collect())
}

/// `H(B)`, the limit of `H(B | Y_t)` as `t → ∞`, from the stationary measure.
pub fn equilibrium_entropy(generator: &DiscreteGenerator, exp: &LabelExperiment) -> f64 {
    binary_entropy(prior(generator, &exp.set))
}

/// Both sides of the entropy dissipation identity at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dissipation {
    pub t: f64,
    /// Central difference of `H(B | Y_t)` with step `t / 50`.
    pub dh_dt: f64,
    /// `∫ Γ(u) / (u (1 − u)) dμ̄` with `u = P_t 1_E`.
    pub gamma_integral: f64,
    /// Sign `s` with `dH/dt ≈ s · gamma_integral`, as observed.
    pub sign: f64,
    /// `|dH/dt − s · gamma_integral| / max(|gamma_integral|, 1e−10)`.
    pub relative_residual: f64,
}

/// Relative step of the central difference in [`dissipation_residual`].
pub const DISSIPATION_FD_FRACTION: f64 = 1.0 / 50.0;

/// Compares the measured `dH/dt` with the Γ-integral at time `t`.
///
/// `max_dt` caps the Crank–Nicolson step; it is further capped by the
/// positivity step.
pub fn dissipation_residual(
    generator: &DiscreteGenerator,
    exp: &LabelExperiment,
    t: f64,
    max_dt: Option<f64>,
) -> Result<Dissipation> {
    if !(t > 0.0) {
        return Err(Error::TimeTooSmall { t });
    }
    let delta = t * DISSIPATION_FD_FRACTION;
    let cap = max_dt.unwrap_or(f64::INFINITY).min(experiment_dt(generator));
    let per = libm::ceil(delta / cap - 1e-9).max(1.0);
    let dt = delta / per;
    let per = per as usize;
    let flow = generator.heat_flow(dt)?;
    let mut u = GridField::indicator(&exp.set);
    // t − δ = 49 δ
    let lead = libm::round((t - delta) / delta) as usize;
    flow.advance(&mut u, lead * per)?;
    let h_minus = conditional_entropy(generator, &u);
    flow.advance(&mut u, per)?;
    let centre = u.clone();
    flow.advance(&mut u, per)?;
    let h_plus = conditional_entropy(generator, &u);
    dissipation_at(generator, t, delta, h_minus, &centre, h_plus)
}

fn dissipation_at(
    generator: &DiscreteGenerator,
    t: f64,
    delta: f64,
    h_minus: f64,
    centre: &GridField,
    h_plus: f64,
) -> Result<Dissipation> {
    let dh_dt = (h_plus - h_minus) / (2.0 * delta);
    if centre.iter().any(|&p| !(p > POSTERIOR_FLOOR && p < 1.0 - POSTERIOR_FLOOR)) {
        return Err(Error::TimeTooSmall { t });
    }
    let gamma = generator.gamma(centre, centre)?;
    let total = generator.total_mass();
    let gamma_integral: f64 = (0..generator.len())
        .map(|v| {
            let p = centre[v];
            generator.measure()[v] / total * gamma[v] / (p * (1.0 - p))
        })
        .sum();
    let sign = if dh_dt * gamma_integral >= 0.0 { 1.0 } else { -1.0 };
    let relative_residual = libm::fabs(dh_dt - sign * gamma_integral) / libm::fabs(gamma_integral).max(1e-10);
    Ok(Dissipation {
        t,
        dh_dt,
        gamma_integral,
        sign,
        relative_residual,
    })
}

/// [`dissipation_residual`] at every experiment time in one sweep, carrying
/// the posterior forward between times instead of restarting from `t = 0`.
/// Step sizes differ from the one-time version, so values agree only to
/// discretization accuracy.
pub fn dissipation_series(
    generator: &DiscreteGenerator,
    exp: &LabelExperiment,
    max_dt: Option<f64>,
) -> Result<Vec<Result<Dissipation>>> {
    let cap = max_dt.unwrap_or(f64::INFINITY).min(experiment_dt(generator));
    let run = |u: &mut GridField, span: f64| -> Result<()> {
        if span <= 0.0 {
            return Ok(());
        }
        let steps = libm::ceil(span / cap - 1e-9).max(1.0);
        generator.heat_flow(span / steps)?.advance(u, steps as usize)
    };
    let mut state = GridField::indicator(&exp.set);
    let mut now = 0.0;
    let mut out = Vec::with_capacity(exp.times.len());
    for &t in &exp.times {
        let delta = t * DISSIPATION_FD_FRACTION;
        if now > t - delta {
            state = GridField::indicator(&exp.set);
            now = 0.0;
        }
        let mut u = state.clone();
        run(&mut u, t - delta - now)?;
        let h_minus = conditional_entropy(generator, &u);
        run(&mut u, delta)?;
        state = u.clone();
        now = t;
        run(&mut u, delta)?;
        let h_plus = conditional_entropy(generator, &u);
        out.push(dissipation_at(generator, t, delta, h_minus, &state, h_plus));
    }
    Ok(out)
}
