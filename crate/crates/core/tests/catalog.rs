mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use gammaforge_core::catalog::{all_manifolds, get_manifold, sphere_chart_change, MANIFOLD_NAMES};
use gammaforge_core::jet::Jet;
use gammaforge_core::tensor::max_abs_diff;
use gammaforge_core::Error;
use nalgebra::DMatrix;

use common::{assert_close, rng};

#[test]
fn every_name_resolves_in_order() {
    let all = all_manifolds().unwrap();
    assert_eq!(all.len(), MANIFOLD_NAMES.len());
    for (m, name) in all.iter().zip(MANIFOLD_NAMES) {
        assert_eq!(m.name, name);
        assert!(!m.notes.is_empty());
        assert!(m.spec.weighted_form.is_some());
        assert_eq!(m.truth_christoffels.len(), m.dim().pow(3));
    }
    assert_eq!(get_manifold("euclidean3").unwrap().dim(), 3);
}

#[test]
fn unknown_name_is_an_error() {
    assert!(matches!(get_manifold("klein_bottle"), Err(Error::UnknownManifold(n)) if n == "klein_bottle"));
}

#[test]
fn entry_examples() {
    let e = get_manifold("euclidean2").unwrap();
    let x = [0.3, -1.2];
    assert!(e.ricci_at(&x).unwrap().iter().all(|&v| v == 0.0));
    assert!(e.christoffels_at(&x).unwrap().to_nested().iter().flatten().flatten().all(|&v| v == 0.0));

    let s = get_manifold("sphere2_spherical").unwrap();
    let ric = s.ricci_at(&[PI / 3.0, 0.4]).unwrap();
    assert!(max_abs_diff(&ric, &DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.75]))) <= 1e-15);

    let ou = get_manifold("ou_gaussian1").unwrap();
    for x in [-2.0, 0.5, 1.5] {
        assert_close(ou.log_rho_at(&[x]).unwrap(), -x * x / 2.0, 1e-15, "log ρ");
        assert_eq!(ou.metric_at(&[x]).unwrap()[(0, 0)], 1.0);
        assert_close(ou.spec.drift.eval(&[x]).unwrap()[0], -x, 1e-15, "drift");
    }
}

#[test]
fn regeneration_holds_at_random_points() {
    let mut r = rng(100);
    for m in all_manifolds().unwrap() {
        for _ in 0..100 {
            let u: Vec<f64> = (0..m.dim()).map(|_| rand::Rng::random_range(&mut r, 0.0..=1.0)).collect();
            let x = m.sample_point(&u);
            assert!(m.sample_box.contains(&x));
            let d = m.regeneration_residual(&x).unwrap();
            assert!(d <= 1e-12, "{} at {x:?}: {d:e}", m.name);
        }
    }
}

#[test]
fn conformal_torus_matches_the_curvature_formula() {
    // Ric = K g with K = −e^{−2φ} Δφ, φ = 0.3 sin x1 cos x2
    let t = get_manifold("torus_conformal").unwrap();
    let mut r = rng(5);
    for _ in 0..50 {
        let x = t.sample_point(&[rand::Rng::random_range(&mut r, 0.0..1.0), rand::Rng::random_range(&mut r, 0.0..1.0)]);
        let phi = 0.3 * x[0].sin() * x[1].cos();
        let lap = -0.6 * x[0].sin() * x[1].cos();
        let k = -(-2.0 * phi).exp() * lap;
        let g = t.metric_at(&x).unwrap();
        assert_close(g[(0, 0)], (2.0 * phi).exp(), 1e-14, "conformal factor");
        assert!(max_abs_diff(&t.ricci_at(&x).unwrap(), &(&g * k)) <= 1e-13);
        let psi = x[0].cos() / 2.0 + 0.3 * x[1].sin();
        assert_close(t.log_rho_at(&x).unwrap(), psi, 1e-15, "log ρ");
    }
}

#[test]
fn sphere_charts_agree_on_the_overlap() {
    let sph = get_manifold("sphere2_spherical").unwrap();
    let ste = get_manifold("sphere2_stereographic").unwrap();
    let phi = sphere_chart_change().unwrap();
    let mut r = rng(9);
    for _ in 0..20 {
        let x = sph.sample_point(&[rand::Rng::random_range(&mut r, 0.0..1.0), rand::Rng::random_range(&mut r, 0.0..1.0)]);
        let p: Arc<[f64]> = Arc::from(x.as_slice());
        let comps: Vec<Jet> = phi.jets(sph.spec.layout(), &p, 1).unwrap();
        let j = DMatrix::from_fn(2, 2, |a, b| comps[a].gradient()[b]);
        let y: Vec<f64> = comps.iter().map(Jet::value).collect();
        let pulled = j.transpose() * ste.metric_at(&y).unwrap() * &j;
        assert!(max_abs_diff(&pulled, &sph.metric_at(&x).unwrap()) <= 1e-12, "metric at {x:?}");
        let pulled_ric = j.transpose() * ste.ricci_at(&y).unwrap() * &j;
        assert!(max_abs_diff(&pulled_ric, &sph.ricci_at(&x).unwrap()) <= 1e-12, "Ricci at {x:?}");
        assert_close(sph.log_rho_at(&x).unwrap(), ste.log_rho_at(&y).unwrap(), 1e-15, "log ρ");
    }
}

#[test]
fn sample_boxes_avoid_coordinate_singularities() {
    let s = get_manifold("sphere2_spherical").unwrap();
    assert_close(s.sample_box.lo[0], 0.2, 1e-15, "θ min");
    assert_close(s.sample_box.hi[0], PI - 0.2, 1e-15, "θ max");
    let h = get_manifold("hyperbolic_halfplane").unwrap();
    assert_eq!((h.sample_box.lo[1], h.sample_box.hi[1]), (0.5, 4.0));
}
