use proptest::prelude::*;

use virial_bounds::bounds::{euler_tree_partial_sum, f_breve, f_lp, f_star, BoundsReport};
use virial_bounds::potentials::{catalog, lookup, Expr};
use virial_bounds::quadrature::{c_regular, c_tilde, PotentialConstants};

const F_ZERO: f64 = 0.144767;
const F_STAR_LIMIT: f64 = 0.241857;

#[test]
fn tree_graph_radius_dominates_penrose_on_catalog() {
    for entry in catalog() {
        for beta in [0.1, 1.0, 5.0] {
            let pc = PotentialConstants::compute(&entry.potential, beta, 1e-10).unwrap();
            let r = BoundsReport::new(&entry.stability, &pc, None).unwrap();
            // Logarithms, since the radii underflow for large βB.
            let (pr, tg) = (r.ln_mayer.penrose_ruelle, r.ln_mayer.tree_graph);
            assert!(tg >= pr, "{} beta={beta}: {tg} < {pr}", entry.potential.name());
            let equal = (tg - pr).abs() <= 1e-10;
            assert_eq!(equal, entry.stability.b_upper == 0.0, "{} beta={beta}", entry.potential.name());
        }
    }
}

#[test]
fn f_lp_nondecreasing() {
    let vals: Vec<f64> = (0..=200).map(|i| f_lp(i as f64 * 0.05)).collect();
    assert!(vals.windows(2).all(|w| w[1] >= w[0] - 1e-12));
}

#[test]
fn positive_potential_collapse() {
    let hs = lookup("hard-sphere").unwrap();
    for beta in [0.5, 1.0, 3.0] {
        let pc = PotentialConstants::compute(&hs.potential, beta, 1e-10).unwrap();
        let v = BoundsReport::new(&hs.stability, &pc, None).unwrap().virial;
        let c = pc.c_regular.value;
        for r in [v.lebowitz_penrose, v.stable_variant, v.stab] {
            assert!((r * c - F_ZERO).abs() < 1e-6, "{r}");
        }
        assert_eq!(v.lebowitz_penrose, v.stable_variant);
        assert_eq!(v.stable_variant, v.stab);
    }
}

#[test]
fn stab_improves_on_stable_variant_for_catalog() {
    for entry in catalog() {
        let pc = PotentialConstants::compute(&entry.potential, 1.0, 1e-10).unwrap();
        let v = BoundsReport::new(&entry.stability, &pc, None).unwrap().virial;
        assert!(v.stab >= v.stable_variant, "{}", entry.potential.name());
        assert_eq!(v.best, v.stab);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn c_tilde_never_exceeds_c(beta in 0.01f64..10.0, idx in 0usize..4) {
        let p = &catalog()[idx].potential;
        let c = c_regular(p, beta, 1e-9).unwrap();
        let ct = c_tilde(p, beta, 1e-9).unwrap();
        prop_assert!(ct.value <= c.value + c.abs_error_estimate + ct.abs_error_estimate);
    }

    #[test]
    fn f_star_nondecreasing_and_bracketed(
        b_star in 0.0f64..5.0,
        excess in 0.0f64..20.0,
        beta in 0.0f64..20.0,
        step in 0.0f64..5.0,
    ) {
        let bbar = 2.0 * b_star + excess;
        let lo = f_star(beta, bbar, b_star);
        let hi = f_star(beta + step, bbar, b_star);
        prop_assert!(hi >= lo - 1e-12);
        prop_assert!((F_ZERO - 1e-5..=F_STAR_LIMIT + 1e-5).contains(&lo), "{}", lo);
    }

    #[test]
    fn f_breve_always_positive(c1 in -50.0f64..50.0, ratio in 0.01f64..100.0, beta in 0.0f64..5.0, b_star in 0.0f64..3.0) {
        prop_assert!(f_breve(beta, 2.0 * b_star + c1.abs(), b_star, ratio, 1.0) > 0.0);
    }

    #[test]
    fn f_lp_between_limits(s in 0.0f64..40.0) {
        let f = f_lp(s);
        prop_assert!(f >= F_ZERO - 1e-6 && f <= (-1.0f64).exp() + 1e-12);
    }

    #[test]
    fn euler_partial_sums_increase_towards_w(w in 0.0f64..1.0, n in 1usize..300) {
        let a = euler_tree_partial_sum(w, n);
        let b = euler_tree_partial_sum(w, n + 1);
        prop_assert!(b >= a);
        prop_assert!(b <= w * (1.0 + 1e-12));
    }

    #[test]
    fn expression_matches_closed_form(r in 0.5f64..5.0, a in 0.5f64..5.0) {
        let e = Expr::parse(&format!("exp(-2*{a}*(r-1)) - 2*exp(-{a}*(r-1))")).unwrap();
        let direct = (-2.0 * a * (r - 1.0)).exp() - 2.0 * (-a * (r - 1.0)).exp();
        prop_assert!((e.eval(r) - direct).abs() <= 1e-12 * direct.abs().max(1.0));
    }
}
