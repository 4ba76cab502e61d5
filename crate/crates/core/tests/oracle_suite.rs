use std::f64::consts::PI;

use virial_bounds::basuev::{certify, MuBound};
use virial_bounds::oracle::{
    c2, c3, check_bounds, triangle_monte_carlo, triangle_quadrature, virial_b2, virial_b3, BoundKind, OracleConfig,
};
use virial_bounds::potentials::{catalog, lookup};
use virial_bounds::quadrature::{c_breve_terms, PotentialConstants};

fn quick() -> OracleConfig {
    OracleConfig { samples: 1_000_000, ..OracleConfig::default() }
}

#[test]
fn b2_is_twice_c2_on_catalog() {
    for e in catalog() {
        for beta in [0.3, 1.0, 2.0] {
            let c = c2(&e.potential, beta, 1e-10).unwrap().value;
            let b = virial_b2(&e.potential, beta, 1e-10).unwrap().value;
            assert!((b - 2.0 * c).abs() <= 1e-10 * b.abs(), "{}", e.potential.name());
        }
    }
}

#[test]
fn hard_sphere_coefficients() {
    let hs = lookup("hard-sphere").unwrap().potential;
    let c = c2(&hs, 1.0, 1e-10).unwrap();
    assert!((c.value + 2.0 * PI / 3.0).abs() < 1e-8);
    let b3 = virial_b3(&hs, 1.0, &quick()).unwrap();
    assert!((b3.value + 5.0 * PI * PI / 6.0).abs() < 1e-8, "{b3:?}");
    let c3v = c3(&hs, 1.0, &quick()).unwrap();
    assert!((c3v.value - 0.75 * PI * PI).abs() < 1e-8, "{c3v:?}");
}

#[test]
fn hard_sphere_triangle_monte_carlo_within_one_percent() {
    let hs = lookup("hard-sphere").unwrap().potential;
    let mc = triangle_monte_carlo(&hs, 1.0, 1_000_000, 7).unwrap();
    let exact = -5.0 * PI * PI / 6.0;
    assert!(((mc.value - exact) / exact).abs() < 0.01, "{mc:?}");
}

#[test]
fn second_coefficient_vanishes_at_high_temperature() {
    let lj = lookup("lj").unwrap().potential;
    // The repulsive core keeps f ≈ -1 out to r ~ β^{1/12}, so |c₂| ~ β^{1/4}.
    let hot = c2(&lj, 1e-16, 1e-10).unwrap().value.abs();
    let warm = c2(&lj, 1e-8, 1e-10).unwrap().value.abs();
    assert!(hot < warm && hot < 1e-3, "{hot} {warm}");
}

#[test]
fn quadrature_and_monte_carlo_agree_on_catalog() {
    for e in catalog() {
        let q = triangle_quadrature(&e.potential, 1.0, 1e-8).unwrap();
        let m = triangle_monte_carlo(&e.potential, 1.0, 1_000_000, 42).unwrap();
        let gap = (q.value - m.value).abs();
        assert!(gap <= q.error_estimate + m.error_estimate, "{}: {q:?} vs {m:?}", e.potential.name());
    }
}

#[test]
fn monte_carlo_is_reproducible() {
    let lj = lookup("lj").unwrap().potential;
    let a = triangle_monte_carlo(&lj, 1.0, 100_003, 42).unwrap();
    let b = triangle_monte_carlo(&lj, 1.0, 100_003, 42).unwrap();
    let c = triangle_monte_carlo(&lj, 1.0, 100_003, 43).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.error_estimate.to_bits(), b.error_estimate.to_bits());
    assert_ne!(a.value, c.value);
}

#[test]
fn catalog_coefficients_respect_all_bounds() {
    for e in catalog() {
        let p = &e.potential;
        let pc = PotentialConstants::compute(p, 1.0, 1e-10).unwrap();
        for est in [c2(p, 1.0, 1e-10).unwrap(), c3(p, 1.0, &quick()).unwrap()] {
            let report = check_bounds(&est, &e.stability, &pc, None).unwrap();
            assert!(report.checks.iter().all(|c| c.tightness <= 1.0 + 1e-9), "{}: {report:?}", p.name());
        }
    }
}

#[test]
fn lennard_jones_with_basuev_bound() {
    let e = lookup("lj").unwrap();
    let p = &e.potential;
    let cert = certify(p, 0.6397, &MuBound::LennardJones).unwrap();
    let cb = c_breve_terms(p, 1.0, 0.6397, e.stability.bbar_lower(3), 1e-10).unwrap();
    let pc = PotentialConstants::compute(p, 1.0, 1e-10).unwrap().with_c_breve(cb);
    let c2v = c2(p, 1.0, 1e-10).unwrap();
    let report = check_bounds(&c2v, &e.stability, &pc, Some(&cert)).unwrap();
    assert!(report.checks.iter().any(|c| c.bound == BoundKind::Basuev));
    assert!(report.lemma_beats_tree_graph_and_basuev);
    let lemma = report.checks.iter().find(|c| c.bound == BoundKind::Lemma).unwrap();
    assert!(lemma.tightness < 1.0);
    assert!((lemma.value - 0.5 * 1f64.exp() * pc.c_tilde.value).abs() < 1e-6);

    let c3v = c3(p, 1.0, &quick()).unwrap();
    let report = check_bounds(&c3v, &e.stability, &pc, Some(&cert)).unwrap();
    let lemma = report.checks.iter().find(|c| c.bound == BoundKind::Lemma).unwrap();
    assert!(lemma.tightness < 1.0);
    assert!(report.lemma_beats_tree_graph_and_basuev);
}

#[test]
fn hard_sphere_saturates_penrose_at_second_order() {
    let e = lookup("hard-sphere").unwrap();
    let pc = PotentialConstants::compute(&e.potential, 1.0, 1e-10).unwrap();
    let c2v = c2(&e.potential, 1.0, 1e-10).unwrap();
    let report = check_bounds(&c2v, &e.stability, &pc, None).unwrap();
    let penrose = report.checks.iter().find(|c| c.bound == BoundKind::Penrose).unwrap();
    assert!((penrose.tightness - 1.0).abs() < 1e-8);
}

#[test]
fn wrong_coefficient_is_flagged() {
    let e = lookup("lj").unwrap();
    let pc = PotentialConstants::compute(&e.potential, 1.0, 1e-10).unwrap();
    let mut c2v = c2(&e.potential, 1.0, 1e-10).unwrap();
    c2v.value *= 10.0;
    assert!(matches!(
        check_bounds(&c2v, &e.stability, &pc, None),
        Err(virial_bounds::oracle::OracleError::BoundViolation { .. })
    ));
}
