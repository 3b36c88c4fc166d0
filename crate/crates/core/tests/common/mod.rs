#![allow(dead_code)]

use std::sync::Arc;

use gammaforge_core::jet::{Jet, JetLayout};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Jet with derivatives uniform in `[-1, 1]`.
pub fn random_jet(layout: &Arc<JetLayout>, order: usize, point: Arc<[f64]>, rng: &mut impl Rng) -> Jet {
    Jet::from_fn(layout, order, point, |_| rng.random_range(-1.0..=1.0)).unwrap()
}

pub fn random_point(lo: &[f64], hi: &[f64], rng: &mut impl Rng) -> Vec<f64> {
    lo.iter().zip(hi).map(|(l, h)| rng.random_range(*l..=*h)).collect()
}

pub fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= tol,
        "{what}: got {actual}, expected {expected} (tolerance {tol:e})"
    );
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
