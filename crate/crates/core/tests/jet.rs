mod common;

use std::sync::Arc;

use gammaforge_core::expr::parse_expr;
use gammaforge_core::jet::{monomial_probe, Jet, JetLayout, JetMatrix, MultiIndex, UnivariateFn, MAX_ORDER};
use gammaforge_core::Error;
use proptest::prelude::*;

use common::{assert_close, max_abs_diff, random_jet, rng};

fn at(x: &[f64]) -> Arc<[f64]> {
    Arc::from(x)
}

fn d1(j: &Jet, k: u8) -> f64 {
    j.deriv(&MultiIndex::new(vec![k])).unwrap()
}

#[test]
fn sum_of_coordinate_and_constant() {
    let l = JetLayout::new(1);
    let x = Jet::coordinate(&l, 2, at(&[0.0]), 0).unwrap();
    let one = Jet::constant(&l, 2, at(&[0.0]), 1.0).unwrap();
    assert_eq!(x.checked_add(&one).unwrap().derivs(), &[1.0, 1.0, 0.0]);
    assert_eq!(x.checked_add(&x.zero_like()).unwrap().derivs(), x.derivs());
}

#[test]
fn sin_plus_cos_at_zero() {
    let l = JetLayout::new(1);
    let x = Jet::coordinate(&l, 3, at(&[0.0]), 0).unwrap();
    let s = x.compose(UnivariateFn::Sin).unwrap();
    let c = x.compose(UnivariateFn::Cos).unwrap();
    let sum = s.checked_add(&c).unwrap();
    assert!(max_abs_diff(sum.derivs(), &[1.0, 1.0, -1.0, -1.0]) < 1e-15);
}

#[test]
fn product_of_binomials() {
    let l = JetLayout::new(1);
    let x = Jet::coordinate(&l, 2, at(&[0.0]), 0).unwrap();
    let a = x.add_constant(1.0);
    let b = x.neg().add_constant(1.0);
    assert_eq!(a.checked_mul(&b).unwrap().derivs(), &[1.0, 0.0, -2.0]);
    assert_eq!(a.checked_mul(&a.constant_like(1.0)).unwrap().derivs(), a.derivs());
}

#[test]
fn sin_cos_matches_half_sin_double_angle() {
    let l = JetLayout::new(1);
    let x = Jet::coordinate(&l, 2, at(&[std::f64::consts::FRAC_PI_4]), 0).unwrap();
    let prod = x
        .compose(UnivariateFn::Sin)
        .unwrap()
        .checked_mul(&x.compose(UnivariateFn::Cos).unwrap())
        .unwrap();
    assert_close(prod.value(), 0.5, 1e-15, "value");
    assert_close(d1(&prod, 1), 0.0, 1e-15, "first derivative");
    assert_close(d1(&prod, 2), -2.0, 1e-15, "second derivative");
}

#[test]
fn exp_of_zero_jet() {
    let l = JetLayout::new(1);
    let zero = Jet::constant(&l, 3, at(&[0.4]), 0.0).unwrap();
    assert_eq!(zero.compose(UnivariateFn::Exp).unwrap().derivs(), &[1.0, 0.0, 0.0, 0.0]);
}

#[test]
fn sin_of_square() {
    let l = JetLayout::new(1);
    let x = Jet::coordinate(&l, 2, at(&[1.0]), 0).unwrap();
    let s = x.checked_mul(&x).unwrap().compose(UnivariateFn::Sin).unwrap();
    let (s1, c1) = (1f64.sin(), 1f64.cos());
    assert_close(s.value(), s1, 1e-15, "value");
    assert_close(d1(&s, 1), 2.0 * c1, 1e-14, "first");
    assert_close(d1(&s, 2), 2.0 * c1 - 4.0 * s1, 1e-14, "second");
}

#[test]
fn compose_domain_errors() {
    let l = JetLayout::new(1);
    let neg = Jet::constant(&l, 2, at(&[0.0]), -1.0).unwrap();
    let zero = neg.zero_like();
    assert!(matches!(zero.compose(UnivariateFn::Log), Err(Error::Domain { func: "log", .. })));
    assert!(matches!(neg.compose(UnivariateFn::Sqrt), Err(Error::Domain { func: "sqrt", .. })));
    assert!(matches!(zero.recip(), Err(Error::Domain { func: "recip", .. })));
}

#[test]
fn shape_errors_on_mismatch() {
    let l = JetLayout::new(2);
    let a = Jet::coordinate(&l, 2, at(&[0.0, 0.0]), 0).unwrap();
    let other_point = Jet::coordinate(&l, 2, at(&[0.0, 1.0]), 0).unwrap();
    let other_order = Jet::coordinate(&l, 3, at(&[0.0, 0.0]), 0).unwrap();
    let other_dim = Jet::coordinate(&JetLayout::new(1), 2, at(&[0.0]), 0).unwrap();
    for b in [other_point, other_order, other_dim] {
        assert!(matches!(a.checked_add(&b), Err(Error::Shape(_))));
        assert!(matches!(a.checked_mul(&b), Err(Error::Shape(_))));
    }
    assert!(matches!(
        Jet::constant(&l, MAX_ORDER + 1, at(&[0.0, 0.0]), 1.0),
        Err(Error::OrderTooHigh(_))
    ));
}

#[test]
fn jet_has_binomial_count_of_entries() {
    for n in 1..=4usize {
        let l = JetLayout::new(n);
        for k in 0..=MAX_ORDER {
            let binom = (1..=k).fold(1usize, |acc, i| acc * (n + i) / i);
            assert_eq!(l.len(k), binom, "dim {n} order {k}");
            assert!(l.indices(k).iter().all(|a| a.degree() <= k));
        }
    }
}

#[test]
fn identity_inverse_is_identity() {
    let l = JetLayout::new(2);
    let t = Jet::constant(&l, 3, at(&[0.3, 0.1]), 0.0).unwrap();
    let id = JetMatrix::identity(&t, 3);
    let inv = id.inverse().unwrap();
    for (a, b) in inv.entries().iter().zip(id.entries()) {
        assert_eq!(a.derivs(), b.derivs());
    }
}

#[test]
fn half_plane_cometric_inverse() {
    let l = JetLayout::new(2);
    let p = at(&[0.0, 1.0]);
    let y = Jet::coordinate(&l, 2, p.clone(), 1).unwrap();
    let y2 = y.checked_mul(&y).unwrap();
    let zero = y.zero_like();
    let g = JetMatrix::new(2, 2, vec![y2.clone(), zero.clone(), zero, y2]).unwrap();
    let inv = g.inverse().unwrap();
    let e2 = MultiIndex::unit(2, 1);
    let e22 = MultiIndex::pair(2, 1, 1);
    assert_eq!(inv.value(), nalgebra::DMatrix::identity(2, 2));
    assert_close(inv.get(0, 0).deriv(&e2).unwrap(), -2.0, 1e-14, "∂_y g_11");
    assert_close(inv.get(1, 1).deriv(&e22).unwrap(), 6.0, 1e-13, "∂²_y g_22");
    assert_eq!(inv.get(0, 1).derivs().iter().map(|v| v.abs()).fold(0.0, f64::max), 0.0);
}

#[test]
fn singular_inverse_reports_smallest_singular_value() {
    let l = JetLayout::new(1);
    let one = Jet::constant(&l, 2, at(&[0.0]), 1.0).unwrap();
    let m = JetMatrix::new(2, 2, vec![one.clone(), one.clone(), one.clone(), one]).unwrap();
    match m.inverse() {
        Err(Error::Singular { min_singular_value }) => assert!(min_singular_value < 1e-14),
        other => panic!("expected a singularity error, got {other:?}"),
    }
}

#[test]
fn monomial_probe_examples() {
    let l = JetLayout::new(2);
    let p = monomial_probe(&l, at(&[0.0, 0.0]), &[1.0, 0.0], 3).unwrap();
    assert_eq!(p.value(), 0.0);
    assert_eq!(p.gradient(), vec![1.0, 0.0]);
    assert!(p.derivs()[3..].iter().all(|&v| v == 0.0));
    let zero = monomial_probe(&l, at(&[0.5, 0.5]), &[0.0, 0.0], 2).unwrap();
    assert!(zero.derivs().iter().all(|&v| v == 0.0));
    let q = monomial_probe(&l, at(&[1.0, 2.0]), &[3.0, -1.0], 2).unwrap();
    let affine = parse_expr("3*(x1-1) - (x2-2)", 2).unwrap().eval_jet(&l, &at(&[1.0, 2.0]), 2).unwrap();
    assert_eq!(q.derivs(), affine.derivs());
    assert!(matches!(
        monomial_probe(&l, at(&[0.0, 0.0]), &[1.0, 0.0], 1),
        Err(Error::OrderTooLow { .. })
    ));
}

#[test]
fn partial_shifts_derivatives() {
    let l = JetLayout::new(2);
    let f = parse_expr("x1^3*x2 + x2^2", 2).unwrap().eval_jet(&l, &at(&[1.0, 2.0]), 3).unwrap();
    let fx = f.partial(0).unwrap();
    let expect = parse_expr("3*x1^2*x2", 2).unwrap().eval_jet(&l, &at(&[1.0, 2.0]), 2).unwrap();
    assert!(max_abs_diff(fx.derivs(), expect.derivs()) < 1e-14);
    assert!(matches!(f.truncate(0).partial(0), Err(Error::OrderTooLow { .. })));
}

/// Leibniz convolution recomputed by a double loop over multi-indices.
fn brute_force_product(a: &Jet, b: &Jet) -> Vec<f64> {
    let layout = a.layout();
    layout
        .indices(a.order())
        .iter()
        .map(|gamma| {
            let g = gamma.exponents();
            let mut total = 0.0;
            for beta in layout.indices(a.order()) {
                let bexp = beta.exponents();
                if bexp.iter().zip(g).any(|(b, g)| b > g) {
                    continue;
                }
                let rest = MultiIndex::new(g.iter().zip(bexp).map(|(g, b)| g - b).collect());
                let coeff: f64 = g
                    .iter()
                    .zip(bexp)
                    .map(|(&g, &b)| (0..b).fold(1.0, |acc, i| acc * (g - i) as f64 / (i + 1) as f64))
                    .product();
                total += coeff * a.deriv(beta).unwrap() * b.deriv(&rest).unwrap();
            }
            total
        })
        .collect()
}

#[test]
fn leibniz_matches_brute_force_in_every_dimension() {
    let mut r = rng(11);
    for n in 1..=3 {
        let l = JetLayout::new(n);
        for order in 0..=MAX_ORDER {
            let p: Arc<[f64]> = vec![0.2; n].into();
            let a = random_jet(&l, order, p.clone(), &mut r);
            let b = random_jet(&l, order, p, &mut r);
            let fast = a.checked_mul(&b).unwrap();
            assert!(max_abs_diff(fast.derivs(), &brute_force_product(&a, &b)) < 1e-13);
        }
    }
}

#[test]
fn compositions_match_symbolic_derivatives() {
    let fixture = include_str!("fixtures/compositions.txt");
    let l = JetLayout::new(2);
    let mut cases = 0;
    for line in fixture.lines().filter(|s| !s.is_empty()) {
        let mut parts = line.split(';');
        let source = parts.next().unwrap();
        let point: Vec<f64> = parts.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        let order: usize = parts.next().unwrap().parse().unwrap();
        let jet = parse_expr(source, 2).unwrap().eval_jet(&l, &at(&point), order).unwrap();
        for entry in parts {
            let (alpha, value) = entry.split_once('=').unwrap();
            let alpha = MultiIndex::new(alpha.split(' ').map(|s| s.parse().unwrap()).collect());
            let expected: f64 = value.parse().unwrap();
            let got = jet.deriv(&alpha).unwrap();
            assert!(
                (got - expected).abs() <= 1e-10 * expected.abs().max(1.0),
                "{source} at {alpha:?}: {got} vs {expected}"
            );
        }
        cases += 1;
    }
    assert_eq!(cases, 20);
}

fn jet_strategy(n: usize, order: usize) -> impl Strategy<Value = Vec<f64>> {
    let len = JetLayout::new(n).len(order);
    prop::collection::vec(-1.0f64..1.0, len)
}

fn make(n: usize, order: usize, derivs: Vec<f64>) -> Jet {
    Jet::from_derivs(&JetLayout::new(n), order, vec![0.1; n].into(), derivs).unwrap()
}

proptest! {
    #[test]
    fn add_and_mul_commute_and_associate(
        a in jet_strategy(2, 4), b in jet_strategy(2, 4), c in jet_strategy(2, 4)
    ) {
        let (a, b, c) = (make(2, 4, a), make(2, 4, b), make(2, 4, c));
        let ab = a.checked_mul(&b).unwrap();
        prop_assert!(max_abs_diff(ab.derivs(), b.checked_mul(&a).unwrap().derivs()) <= 1e-12);
        let left = ab.checked_mul(&c).unwrap();
        let right = a.checked_mul(&b.checked_mul(&c).unwrap()).unwrap();
        prop_assert!(max_abs_diff(left.derivs(), right.derivs()) <= 1e-12);
        let s1 = a.checked_add(&b).unwrap().checked_add(&c).unwrap();
        let s2 = a.checked_add(&b.checked_add(&c).unwrap()).unwrap();
        prop_assert!(max_abs_diff(s1.derivs(), s2.derivs()) <= 1e-12);
        prop_assert!(max_abs_diff(a.checked_add(&b).unwrap().derivs(), b.checked_add(&a).unwrap().derivs()) <= 1e-12);
    }

    #[test]
    fn log_inverts_exp(a in jet_strategy(2, 4)) {
        let a: Vec<f64> = a.iter().map(|v| 0.3 * v).collect();
        let a = make(2, 4, a);
        let back = a.compose(UnivariateFn::Exp).unwrap().compose(UnivariateFn::Log).unwrap();
        prop_assert!(max_abs_diff(back.derivs(), a.derivs()) <= 1e-12);
    }

    #[test]
    fn leibniz_matches_brute_force(a in jet_strategy(3, 4), b in jet_strategy(3, 4)) {
        let (a, b) = (make(3, 4, a), make(3, 4, b));
        prop_assert!(max_abs_diff(a.checked_mul(&b).unwrap().derivs(), &brute_force_product(&a, &b)) <= 1e-12);
    }

    #[test]
    fn inverse_of_random_spd_jet_matrix(entries in prop::collection::vec(jet_strategy(3, 3), 6)) {
        // symmetric 3x3 jets with a dominant diagonal value part
        let l = JetLayout::new(3);
        let p: Arc<[f64]> = vec![0.1; 3].into();
        let upper: Vec<Jet> = entries.into_iter().map(|d| Jet::from_derivs(&l, 3, p.clone(), d).unwrap()).collect();
        let idx = |i: usize, j: usize| { let (i, j) = if i <= j { (i, j) } else { (j, i) }; [0, 1, 2, 1, 3, 4, 2, 4, 5][i * 3 + j] };
        let m = JetMatrix::from_fn(3, 3, |i, j| {
            let e = &upper[idx(i, j)];
            Ok(if i == j { e.add_constant(4.0) } else { e.clone() })
        }).unwrap();
        let product = m.checked_mul(&m.inverse().unwrap()).unwrap();
        let id = JetMatrix::identity(m.get(0, 0), 3);
        for (a, b) in product.entries().iter().zip(id.entries()) {
            prop_assert!(max_abs_diff(a.derivs(), b.derivs()) <= 1e-10);
        }
    }

    #[test]
    fn truncation_never_reads_higher_entries(a in jet_strategy(2, 4), b in jet_strategy(2, 4)) {
        let (a, b) = (make(2, 4, a), make(2, 4, b));
        let full = a.checked_mul(&b).unwrap().truncate(2);
        let low = a.truncate(2).checked_mul(&b.truncate(2)).unwrap();
        prop_assert_eq!(full.derivs(), low.derivs());
    }
}
