mod common;

use std::f64::consts::{LN_2, PI, SQRT_2};
use std::sync::Arc;

use gammaforge_core::catalog::{all_manifolds, get_manifold, sphere_chart_change, ManifoldTruth};
use gammaforge_core::expr::{SymmetricField, VectorField};
use gammaforge_core::generator::GeneratorSpec;
use gammaforge_core::jet::Jet;
use gammaforge_core::oracle::{christoffels_classical, MetricFieldJets, WEIGHTED_HESSIAN_SIGN};
use gammaforge_core::reconstruction::{
    check_conjugacy, distance_refinement, intrinsic_distance, reconstruct_point, recover_christoffels_intrinsic,
    recover_cometric, recover_drift, recover_log_density, recover_metric, recover_ricci_mu, ricci_probes, ChartBox,
};
use gammaforge_core::tensor::max_abs_diff;
use gammaforge_core::Error;
use nalgebra::DMatrix;

use common::{assert_close, rng};

fn spec(diag: &[&str], drift: &[&str]) -> GeneratorSpec {
    GeneratorSpec::new(
        SymmetricField::parse_diagonal(diag).unwrap(),
        VectorField::parse(drift, diag.len()).unwrap(),
        "",
        None,
    )
    .unwrap()
}

fn flat2() -> GeneratorSpec {
    spec(&["1", "1"], &["0", "0"])
}

fn sphere() -> GeneratorSpec {
    spec(&["1", "1/sin(x1)^2"], &["cos(x1)/sin(x1)", "0"])
}

fn half_plane() -> GeneratorSpec {
    spec(&["x2^2", "x2^2"], &["0", "0"])
}

fn diag(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(v))
}

fn interior_points(m: &ManifoldTruth, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let u: Vec<f64> = (0..m.dim()).map(|_| rand::Rng::random_range(&mut r, 0.02..0.98)).collect();
            m.sample_point(&u)
        })
        .collect()
}

#[test]
fn cometric_and_metric_examples() {
    let x = [PI / 3.0, 0.5];
    assert_eq!(recover_cometric(&flat2(), &[3.0, -1.0]).unwrap(), DMatrix::identity(2, 2));
    assert!(max_abs_diff(&recover_cometric(&sphere(), &x).unwrap(), &diag(&[1.0, 4.0 / 3.0])) <= 1e-14);
    assert_eq!(recover_cometric(&half_plane(), &[0.0, 2.0]).unwrap(), diag(&[4.0, 4.0]));

    assert_eq!(recover_metric(&flat2(), &[0.0, 0.0]).unwrap().metric, DMatrix::identity(2, 2));
    let m = recover_metric(&sphere(), &x).unwrap();
    assert!(max_abs_diff(&m.metric, &diag(&[1.0, 0.75])) <= 1e-14);
    assert!(max_abs_diff(&(&m.metric * &m.cometric), &DMatrix::identity(2, 2)) <= 1e-10);
    assert_close(m.min_eigenvalue, 1.0, 1e-14, "min eigenvalue");
    let h = recover_metric(&half_plane(), &[0.0, 2.0]).unwrap();
    assert!(max_abs_diff(&h.metric, &diag(&[0.25, 0.25])) <= 1e-15);

    assert!(matches!(
        recover_metric(&half_plane(), &[0.0, 0.0]),
        Err(Error::NotPositiveDefinite { .. })
    ));
}

#[test]
fn christoffel_examples() {
    let c = recover_christoffels_intrinsic(&spec(&["1", "1", "1"], &["0", "0", "0"]), &[0.1, 0.2, 0.3]).unwrap();
    assert!(c.connection.to_nested().iter().flatten().flatten().all(|&v| v == 0.0));

    let s = recover_christoffels_intrinsic(&sphere(), &[PI / 3.0, 0.0]).unwrap().connection;
    assert_close(s.get(0, 1, 1), -0.433013, 1e-6, "Γ^θ_φφ");
    assert_close(s.get(0, 1, 1), -(3f64.sqrt()) / 4.0, 1e-13, "Γ^θ_φφ");
    assert_close(s.get(1, 0, 1), 1.0 / 3f64.sqrt(), 1e-13, "Γ^φ_θφ");

    for y in [0.5, 1.0, 2.0, 3.5] {
        let h = recover_christoffels_intrinsic(&half_plane(), &[0.7, y]).unwrap().connection;
        assert_close(h.get(0, 0, 1), -1.0 / y, 1e-13, "Γ^x_xy");
        assert_close(h.get(1, 0, 0), 1.0 / y, 1e-13, "Γ^y_xx");
        assert_close(h.get(1, 1, 1), -1.0 / y, 1e-13, "Γ^y_yy");
        assert_close(h.get(0, 0, 0), 0.0, 1e-13, "Γ^x_xx");
    }
}

#[test]
fn ricci_examples() {
    assert!(recover_ricci_mu(&flat2(), &[0.3, 0.3]).unwrap().ric_mu.iter().all(|v| v.abs() <= 1e-14));
    let s = recover_ricci_mu(&sphere(), &[PI / 3.0, 0.0]).unwrap();
    assert!(max_abs_diff(&s.ric_mu, &diag(&[1.0, 0.75])) <= 1e-12, "{}", s.ric_mu);
    assert_eq!(s.convention_sign, WEIGHTED_HESSIAN_SIGN);
    let ou = spec(&["1", "1"], &["-x1", "-x2"]);
    let r = recover_ricci_mu(&ou, &[0.4, -1.2]).unwrap();
    assert!(max_abs_diff(&r.ric_mu, &DMatrix::identity(2, 2)) <= 1e-12);
}

#[test]
fn ricci_probes_have_vanishing_covariant_hessian() {
    let s = sphere();
    let x = [1.1, 0.3];
    let conn = recover_christoffels_intrinsic(&s, &x).unwrap().connection;
    for f in ricci_probes(&s, &x).unwrap() {
        let h = gammaforge_core::oracle::covariant_hessian(&f, &conn).unwrap();
        assert!(h.iter().all(|v| v.abs() <= 1e-14));
    }
}

#[test]
fn drift_examples() {
    assert_eq!(recover_drift(&flat2(), &[1.0, 2.0]).unwrap(), vec![0.0, 0.0]);
    let ou = spec(&["1"], &["-x1"]);
    assert_close(recover_drift(&ou, &[1.5]).unwrap()[0], -1.5, 1e-15, "OU drift");
    for theta in [0.3, PI / 3.0, 2.0] {
        let z = recover_drift(&sphere(), &[theta, 0.0]).unwrap();
        assert!(z.iter().all(|v| v.abs() <= 1e-13), "{z:?}");
    }
}

#[test]
fn log_density_examples() {
    let r = recover_log_density(&flat2(), &[0.0, 0.0], &[vec![1.0, 2.0], vec![-3.0, 0.5]]).unwrap();
    assert!(r.log_rho.iter().all(|&v| v == 0.0));

    let ou = spec(&["1"], &["-x1"]);
    let r = recover_log_density(&ou, &[0.0], &[vec![2.0]]).unwrap();
    assert_close(r.log_rho[0], -2.0, 1e-12, "OU log ρ");

    let product = spec(&["1", "1"], &["x2", "x1"]);
    let r = recover_log_density(&product, &[0.0, 0.0], &[vec![1.0, 1.0]]).unwrap();
    assert_close(r.log_rho[0], 1.0, 1e-12, "log ρ = x1 x2");
    assert!(r.one_form_closedness <= 1e-12);
    assert!(r.path_independence_residual <= 1e-12);

    let rotation = spec(&["1", "1"], &["-x2", "x1"]);
    match recover_log_density(&rotation, &[0.0, 0.0], &[vec![1.0, 1.0]]) {
        Err(Error::NoInvariantDensity { closedness }) => assert!(closedness >= 0.5, "{closedness}"),
        other => panic!("rotation drift accepted: {other:?}"),
    }
}

#[test]
fn distance_examples() {
    let unit = ChartBox::new(vec![-0.5, -0.5], vec![1.5, 1.5]).unwrap();
    let d = intrinsic_distance(&flat2(), &unit, 64, &[0.0, 0.0], &[1.0, 0.0]).unwrap();
    assert!((d - 1.0).abs() <= 0.02, "{d}");
    let d = intrinsic_distance(&flat2(), &unit, 64, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
    assert!((d - SQRT_2).abs() <= 0.03 * SQRT_2, "{d}");

    let hbox = ChartBox::new(vec![-1.0, 0.5], vec![1.0, 2.5]).unwrap();
    let d = intrinsic_distance(&half_plane(), &hbox, 64, &[0.0, 1.0], &[0.0, 2.0]).unwrap();
    assert!((d - LN_2).abs() <= 0.03 * LN_2, "{d}");

    // refinement converges toward log 2
    let refine = distance_refinement(&half_plane(), &hbox, &[16, 32, 64, 128], &[0.0, 1.0], &[0.0, 2.0]).unwrap();
    let errs: Vec<f64> = refine.iter().map(|(_, d)| (d - LN_2).abs()).collect();
    assert!(errs.windows(2).all(|w| w[1] <= w[0]), "{refine:?}");

    assert!(ChartBox::new(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
    assert!(intrinsic_distance(&flat2(), &unit, 0, &[0.0, 0.0], &[1.0, 0.0]).is_err());
    assert!(intrinsic_distance(&half_plane(), &ChartBox::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap(), 8, &[0.0, 0.5], &[0.0, 0.75]).is_err());
}

#[test]
fn conjugacy_examples() {
    let samples = vec![vec![0.1, 1.0], vec![-0.4, 2.0], vec![0.9, 0.6], vec![0.0, 3.0]];
    let id = VectorField::parse(&["x1", "x2"], 2).unwrap();
    let s = sphere();
    let sphere_samples = vec![vec![1.0, 0.2], vec![2.0, -1.0]];
    let r = check_conjugacy(&s, &s, &id, &sphere_samples).unwrap();
    assert_eq!(r.max_gamma_residual(), 0.0);
    assert_eq!(r.max_metric_residual(), 0.0);
    assert_eq!(r.measure_ratio_variation, Some(0.0));

    let hp = half_plane();
    let isometry = VectorField::parse(&["2*x1 + 1", "2*x2"], 2).unwrap();
    let r = check_conjugacy(&hp, &hp, &isometry, &samples).unwrap();
    assert!(r.max_gamma_residual() <= 1e-9);
    assert!(r.max_metric_residual() <= 1e-9);
    assert!(r.is_isometry(1e-9));

    let r = check_conjugacy(&flat2(), &hp, &id, &[vec![0.0, 2.0]]).unwrap();
    assert!(r.max_metric_residual() >= 0.5, "{r:?}");
    assert!(r.max_gamma_residual() >= 0.1);
    assert!(!r.is_isometry(1e-3));

    let collapse = VectorField::parse(&["x1 + x2", "x1 + x2"], 2).unwrap();
    assert!(matches!(
        check_conjugacy(&hp, &hp, &collapse, &samples),
        Err(Error::Singular { .. })
    ));
}

#[test]
fn sphere_charts_are_isometric_under_stereographic_projection() {
    let sph = get_manifold("sphere2_spherical").unwrap();
    let ste = get_manifold("sphere2_stereographic").unwrap();
    let samples = interior_points(&sph, 20, 8);
    let r = check_conjugacy(&sph.spec, &ste.spec, &sphere_chart_change().unwrap(), &samples).unwrap();
    assert!(r.max_gamma_residual() <= 1e-8, "{r:?}");
    assert!(r.max_metric_residual() <= 1e-8, "{r:?}");
    assert!(r.measure_ratio_variation.is_some());
}

#[test]
fn recovered_cometric_matches_coefficients() {
    for m in all_manifolds().unwrap() {
        for x in interior_points(&m, 50, 1) {
            let d = max_abs_diff(&recover_cometric(&m.spec, &x).unwrap(), &m.spec.cometric.eval(&x).unwrap());
            assert!(d <= 1e-11, "{}: {d:e}", m.name);
        }
    }
}

#[test]
fn recovered_cometric_transforms_as_a_tensor() {
    let sph = get_manifold("sphere2_spherical").unwrap();
    let ste = get_manifold("sphere2_stereographic").unwrap();
    let phi = sphere_chart_change().unwrap();
    for x in interior_points(&sph, 20, 4) {
        let p: Arc<[f64]> = Arc::from(x.as_slice());
        let comps: Vec<Jet> = phi.jets(sph.spec.layout(), &p, 1).unwrap();
        let j = DMatrix::from_fn(2, 2, |a, b| comps[a].gradient()[b]);
        let y: Vec<f64> = comps.iter().map(Jet::value).collect();
        let pushed = &j * recover_cometric(&sph.spec, &x).unwrap() * j.transpose();
        let there = recover_cometric(&ste.spec, &y).unwrap();
        let scale = there.amax().max(1.0);
        assert!(max_abs_diff(&pushed, &there) <= 1e-8 * scale, "at {x:?}");
    }
}

#[test]
fn intrinsic_connection_matches_classical_everywhere() {
    for m in all_manifolds().unwrap() {
        for x in interior_points(&m, 50, 2) {
            let rec = recover_christoffels_intrinsic(&m.spec, &x).unwrap();
            let g = MetricFieldJets::from_spec(&m.spec, &x, 1).unwrap();
            let classical = christoffels_classical(&g).unwrap();
            assert!(rec.connection.max_abs_diff(&classical) <= 1e-8, "{}", m.name);
            assert!(rec.connection.max_abs_diff(&m.christoffels_at(&x).unwrap()) <= 1e-8, "{}", m.name);
            assert_eq!(rec.connection.torsion(), 0.0);
            assert!(rec.raw_asymmetry <= 1e-9, "{}: {}", m.name, rec.raw_asymmetry);
        }
    }
}

#[test]
fn recovered_ricci_matches_oracle() {
    for m in all_manifolds().unwrap() {
        for x in interior_points(&m, 30, 3) {
            let r = recover_ricci_mu(&m.spec, &x).unwrap();
            assert!(max_abs_diff(&r.ric_mu, &r.ric_mu.transpose()) <= 1e-10);
            let d = max_abs_diff(&r.ric_mu, &m.ricci_mu_at(&x).unwrap());
            assert!(d <= 1e-7, "{}: {d:e}", m.name);
        }
    }
}

#[test]
fn log_density_is_path_independent_and_matches_truth() {
    for m in all_manifolds().unwrap() {
        let pts = interior_points(&m, 6, 6);
        let base = &pts[0];
        let r = recover_log_density(&m.spec, base, &pts[1..]).unwrap();
        assert!(r.path_independence_residual <= 1e-8, "{}: {:e}", m.name, r.path_independence_residual);
        let truth0 = m.log_rho_at(base).unwrap();
        for (t, v) in pts[1..].iter().zip(&r.log_rho) {
            assert_close(*v, m.log_rho_at(t).unwrap() - truth0, 1e-8, &m.name);
        }
    }
}

#[test]
fn geometry_report_cross_checks_are_small() {
    let mut r = rng(12);
    for m in all_manifolds().unwrap() {
        let x = m.sample_point(&vec![0.37; m.dim()]);
        let p: Arc<[f64]> = Arc::from(x.as_slice());
        let probes: Vec<Jet> = (0..5).map(|_| common::random_jet(m.spec.layout(), 3, p.clone(), &mut r)).collect();
        let rep = reconstruct_point(&m.spec, &x, &probes, WEIGHTED_HESSIAN_SIGN).unwrap();
        let d = &rep.diagnostics;
        assert!(d.min_eig > 0.0);
        assert!(d.koszul_crosscheck <= 1e-8, "{}", m.name);
        assert!(d.bochner_residual <= 1e-8, "{}", m.name);
        assert!(d.ricci_crosscheck <= 1e-7, "{}", m.name);
        assert!(d.one_form_closedness <= 1e-9, "{}", m.name);
        assert_eq!(rep.point, x);
    }
}
