mod common;

use common::*;
use m1poly::draws::{draw_rng, DrawBox};
use m1poly::families::{BigJacobiParams, ChiharaParams};
use m1poly::quadrature::*;
use rand::RngExt;

#[test]
fn chihara_mass_and_odd_integrands() {
    let cfg = QuadConfig::default();
    let p = ChiharaParams::new(0.5, 0.0).unwrap();
    let dom = TwoBranchDomain::new(0.0, f64::INFINITY).unwrap();
    let mass = integrate(|x| p.weight(x, true), &dom, &cfg).unwrap();
    assert!((mass - 1.0).abs() < 1e-12, "{mass}");
    let odd = integrate(|x| Ok(x * x * x * p.weight(x, true)?), &dom, &cfg).unwrap();
    assert!(odd.abs() < 1e-13, "{odd}");
}

#[test]
fn bigjacobi_mass_matches_gamma_formula() {
    let cfg = QuadConfig::default();
    let dom = TwoBranchDomain::new(0.0, 1.0).unwrap();
    for (a, b, c) in [
        (1.0f64, 1.0f64, 0.0f64),
        (0.3, 2.2, 0.4),
        (-0.7, -0.5, -0.25),
    ] {
        let p = BigJacobiParams::new(a, b, c).unwrap();
        let dom = if c == 0.0 {
            dom
        } else {
            TwoBranchDomain::new(c.abs(), 1.0).unwrap()
        };
        let mass = integrate_nodes(|n| Ok(bigjacobi_weight_at(&p, n)), &dom, &cfg).unwrap();
        let g = |x: f64| libm::tgamma(x);
        let h0 = g((a + 1.0) / 2.0) * g((b + 1.0) / 2.0) / g((a + b) / 2.0 + 1.0);
        let want = (1.0 - c * c).powf((a + b + 2.0) / 2.0) / (1.0 + c) * h0;
        assert!(
            (mass - want).abs() <= 1e-10 * want,
            "({a}, {b}, {c}): {mass} vs {want}"
        );
    }
}

#[test]
fn chihara_gram_example_and_gamma_parity() {
    let cfg = QuadConfig::default();
    let g = chihara_gram(6, &ChiharaParams::new(0.8, 0.4).unwrap(), &cfg).unwrap();
    assert!(scaled_gram_error(&g, &[1.0; 7]) <= 1e-8);
    let h = chihara_gram(6, &ChiharaParams::new(0.8, -0.4).unwrap(), &cfg).unwrap();
    for n in (0..=6).step_by(2) {
        for m in (0..=6).step_by(2) {
            assert!((g[(n, m)] - h[(n, m)]).abs() < 1e-12);
        }
    }
    assert_eq!(
        chihara_gram(0, &ChiharaParams::new(1.9, 0.7).unwrap(), &cfg)
            .unwrap()
            .shape(),
        (1, 1)
    );
}

#[test]
fn bigjacobi_gram_symmetric_case() {
    let p = BigJacobiParams::new(1.0, 1.0, 0.0).unwrap();
    let g = bigjacobi_gram(6, &p, &QuadConfig::default()).unwrap();
    assert!(g[(0, 1)].abs() < 1e-14);
    assert!((g[(0, 0)] - p.norm(0).unwrap()).abs() < 1e-12);
    for n in 0..=6 {
        assert!(g[(n, n)] > 0.0);
        for m in 0..n {
            assert!(g[(n, m)].abs() <= 1e-8 * (g[(n, n)] * g[(m, m)]).sqrt());
        }
    }
}

#[test]
fn bigjacobi_gram_with_strong_endpoint_singularities() {
    let cfg = QuadConfig::default();
    // endpoint exponents down to (a+1)/2 = 0.05 are resolved by the node range
    for (a, b, c) in [
        (-0.9, -0.9, 0.0),
        (-0.9, 3.0, 0.5),
        (4.0, -0.9, -0.6),
        (-0.9, -0.9, 0.05),
    ] {
        let p = BigJacobiParams::new(a, b, c).unwrap();
        let g = bigjacobi_gram(6, &p, &cfg).unwrap();
        let h: Vec<f64> = (0..=6).map(|n| p.norm(n).unwrap()).collect();
        assert!(
            scaled_gram_error(&g, &h) <= 1e-8,
            "({a}, {b}, {c}): {:e}",
            scaled_gram_error(&g, &h)
        );
        assert!((&g - g.transpose()).abs().max() <= 1e-12 * h[0]);
    }
}

#[test]
fn bigjacobi_gram_rejects_closed_interval() {
    assert!(bigjacobi_gram(
        2,
        &BigJacobiParams::new(0.5, 0.5, 0.999).unwrap(),
        &QuadConfig::default()
    )
    .is_ok());
    assert!(
        BigJacobiParams::new(0.5, 0.5, 1.0).is_err()
            || bigjacobi_gram(
                2,
                &BigJacobiParams::new(0.5, 0.5, 1.0).unwrap(),
                &QuadConfig::default()
            )
            .is_err()
    );
}

#[test]
fn one_variable_node_doubling() {
    let cfg = QuadConfig::default();
    for i in 0..4 {
        let mut rng = draw_rng(51, i);
        let (p, _) = chihara_draw(&mut rng);
        let d = chihara_gram(6, &p, &cfg).unwrap() - chihara_gram(6, &p, &cfg.doubled()).unwrap();
        assert!(d.abs().max() <= 1e-9);
    }
}

#[test]
fn twovar_grams_are_identity() {
    let cfg = QuadConfig::default();
    let cases = [
        (0.0, rep(0.5, 1), rep(0.5, 1)),
        (0.3, rep(0.6, 1), rep(0.9, -1)),
        (-0.45, rep(1.4, -1), rep(0.35, -1)),
    ];
    for (c, r1, r2) in cases {
        for basis in [TwoVarBasis::Uncoupled, TwoVarBasis::Coupled] {
            let g = twovar_gram(2, c, [r1, r2], basis, &cfg).unwrap();
            assert_eq!(g.shape(), (6, 6));
            let dev = scaled_gram_error(&g, &[1.0; 6]);
            assert!(dev <= 1e-6, "c = {c}, {basis:?}: {dev:e}");
        }
    }
    let g = twovar_gram(
        0,
        0.2,
        [rep(0.7, -1), rep(1.1, 1)],
        TwoVarBasis::Coupled,
        &cfg,
    )
    .unwrap();
    assert!((g[(0, 0)] - 1.0).abs() <= 1e-6);
}

#[test]
fn twovar_degree_four() {
    let g = twovar_gram(
        4,
        0.25,
        [rep(0.8, -1), rep(0.6, 1)],
        TwoVarBasis::Coupled,
        &QuadConfig::default(),
    )
    .unwrap();
    assert_eq!(g.shape(), (15, 15));
    assert!(scaled_gram_error(&g, &[1.0; 15]) <= 1e-6);
}

#[test]
fn twovar_label_order() {
    assert_eq!(
        twovar_labels(1, TwoVarBasis::Uncoupled),
        vec![(0, 0), (0, 1), (1, 0)]
    );
    assert_eq!(
        twovar_labels(1, TwoVarBasis::Coupled),
        vec![(0, 0), (1, 0), (0, 1)]
    );
    assert_eq!(twovar_labels(4, TwoVarBasis::Coupled).len(), 15);
}

#[test]
fn inner_measure_reproduces_bigjacobi_mass() {
    let bx = DrawBox::default();
    let cfg = QuadConfig::default();
    for i in 0..20 {
        let mut rng = draw_rng(52, i);
        let (r1, r2) = (bx.irrep(&mut rng), bx.irrep(&mut rng));
        let c = bx.c(&mut rng);
        let l2 = random_sign(&mut rng) * (c.abs() + rng.random_range(0.1..4.0));
        let r = inner_measure_residual(l2, c, [r1, r2], &cfg).unwrap();
        assert!(r.pass && r.rel_residual <= INNER_MEASURE_TOL, "{r:?}");
    }
}
