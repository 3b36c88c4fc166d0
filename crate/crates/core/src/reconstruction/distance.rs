//! Intrinsic distance, realized as a shortest path on a chart grid whose
//! edges carry the recovered Riemannian length `√(Δxᵀ g(mid) Δx)`.
//!
//! For strongly local forms the sup-over-test-functions distance equals the
//! Riemannian distance, so refining the grid converges to it (up to the
//! angular bias of the finite neighbor stencil).

use alloc::{collections::BinaryHeap, format, vec, vec::Vec};
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::generator::GeneratorSpec;

use super::recover_metric;

/// Axis-aligned box in chart coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl ChartBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.iter().zip(&hi).any(|(l, h)| !(l < h)) {
            return Err(Error::InvalidArgument(format!("degenerate chart box {lo:?}..{hi:?}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (l, h))| l <= x && x <= h)
    }

    /// Point at fraction `u ∈ [0,1]^n` of the box.
    pub fn lerp(&self, u: &[f64]) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).zip(u).map(|((l, h), u)| l + u * (h - l)).collect()
    }
}

#[derive(PartialEq)]
struct Entry {
    dist: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest-path distance between `x` and `y` on a grid of `resolution`
/// cells per axis covering `chart_box`, with all `3^n − 1` neighbor edges
/// (8 in two dimensions). Endpoints snap to the nearest grid node. Fails if
/// the recovered metric degenerates at any grid node.
pub fn intrinsic_distance(
    spec: &GeneratorSpec,
    chart_box: &ChartBox,
    resolution: usize,
    x: &[f64],
    y: &[f64],
) -> Result<f64> {
    let n = spec.dim();
    if chart_box.dim() != n || !(1..=3).contains(&n) {
        return Err(Error::Unsupported(format!("grid distance in dimension {n}")));
    }
    if resolution < 1 {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    if !chart_box.contains(x) || !chart_box.contains(y) {
        return Err(Error::InvalidArgument("endpoints must lie inside the chart box".into()));
    }
    let side = resolution + 1;
    let total = side.pow(n as u32);
    let h: Vec<f64> = (0..n)
        .map(|k| (chart_box.hi[k] - chart_box.lo[k]) / resolution as f64)
        .collect();
    let snap = |p: &[f64]| -> usize {
        (0..n).rev().fold(0, |acc, k| {
            let i = libm::round((p[k] - chart_box.lo[k]) / h[k]) as usize;
            acc * side + i.min(resolution)
        })
    };
    let unpack = |mut node: usize| -> Vec<usize> {
        let mut idx = vec![0; n];
        for slot in idx.iter_mut() {
            *slot = node % side;
            node /= side;
        }
        idx
    };
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(n as u32))
        .map(|code| {
            let mut c = code;
            (0..n)
                .map(|_| {
                    let o = (c % 3) as i64 - 1;
                    c /= 3;
                    o
                })
                .collect::<Vec<_>>()
        })
        .filter(|o| o.iter().any(|&v| v != 0))
        .collect();

    // the search only touches edges near the geodesic, so degeneracy
    // elsewhere in the box is checked up front
    let mut corner = vec![0.0; n];
    for node in 0..total {
        for (k, i) in unpack(node).into_iter().enumerate() {
            corner[k] = chart_box.lo[k] + i as f64 * h[k];
        }
        recover_metric(spec, &corner)?;
    }

    let source = snap(x);
    let target = snap(y);
    let mut dist = vec![f64::INFINITY; total];
    let mut done = vec![false; total];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry { dist: 0.0, node: source });
    let mut mid = vec![0.0; n];
    let mut step = vec![0.0; n];
    while let Some(Entry { dist: d, node }) = heap.pop() {
        if node == target {
            return Ok(d);
        }
        if done[node] {
            continue;
        }
        done[node] = true;
        let idx = unpack(node);
        'edges: for o in &offsets {
            let mut next = 0usize;
            for k in (0..n).rev() {
                let j = idx[k] as i64 + o[k];
                if j < 0 || j > resolution as i64 {
                    continue 'edges;
                }
                next = next * side + j as usize;
                step[k] = o[k] as f64 * h[k];
                mid[k] = chart_box.lo[k] + (idx[k] as f64 + 0.5 * o[k] as f64) * h[k];
            }
            if done[next] {
                continue;
            }
            let g = recover_metric(spec, &mid)?.metric;
            let mut len2 = 0.0;
            for a in 0..n {
                for b in 0..n {
                    len2 += step[a] * g[(a, b)] * step[b];
                }
            }
            let nd = d + libm::sqrt(len2);
            if nd < dist[next] {
                dist[next] = nd;
                heap.push(Entry { dist: nd, node: next });
            }
        }
    }
    Err(Error::InvalidArgument("target unreachable".into()))
}

/// Distances at each resolution, for refinement studies.
pub fn distance_refinement(
    spec: &GeneratorSpec,
    chart_box: &ChartBox,
    resolutions: &[usize],
    x: &[f64],
    y: &[f64],
) -> Result<Vec<(usize, f64)>> {
    resolutions
        .iter()
        .map(|&r| Ok((r, intrinsic_distance(spec, chart_box, r, x, y)?)))
        .collect()
}
