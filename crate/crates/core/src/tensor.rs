//! Pointwise tensor values shared by the reconstruction pipeline and the oracle.

use alloc::{vec, vec::Vec};

use nalgebra::DMatrix;

/// Christoffel symbols `Γ^k_ij` at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionPoint {
    dim: usize,
    coeffs: Vec<f64>,
}

impl ConnectionPoint {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            coeffs: vec![0.0; dim * dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut c = Self::zeros(dim);
        for k in 0..dim {
            for i in 0..dim {
                for j in 0..dim {
                    c.coeffs[(k * dim + i) * dim + j] = f(k, i, j);
                }
            }
        }
        c
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Γ^k_ij`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.coeffs[(k * self.dim + i) * self.dim + j]
    }

    pub fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.coeffs[(k * self.dim + i) * self.dim + j] = v;
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max)
    }

    /// Largest `|Γ^k_ij − Γ^k_ji|`.
    pub fn torsion(&self) -> f64 {
        let n = self.dim;
        let mut t: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    t = t.max(libm::fabs(self.get(k, i, j) - self.get(k, j, i)));
                }
            }
        }
        t
    }

    /// Nested as `[k][i][j]`.
    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        let n = self.dim;
        (0..n)
            .map(|k| (0..n).map(|i| (0..n).map(|j| self.get(k, i, j)).collect()).collect())
            .collect()
    }
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| libm::fabs(x - y)).fold(0.0, f64::max)
}

pub fn max_abs_diff_slice(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| libm::fabs(x - y)).fold(0.0, f64::max)
}

pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}
