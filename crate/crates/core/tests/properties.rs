//! Randomized invariants of the solver and the surface operators.

use proptest::prelude::*;

use torus_crit::exact_algebra::{rat, rat_int, to_f64};
use torus_crit::shape_equation::{el_residual, el_system};
use torus_crit::solver::{default_gauss_terms, solve_pure_h, solve_with_gauss, verify_solution};
use torus_crit::{ExactTorus, Lagrangian, LinearForm, Rational, TorusShape, Unknown};

fn ratio() -> impl Strategy<Value = Rational> {
    (1i64..60, 20i64..40).prop_map(|(n, d)| rat(d + n, d))
}

fn radius() -> impl Strategy<Value = Rational> {
    (1i64..20, 1i64..9).prop_map(|(n, d)| rat(n, d))
}

fn coeffs(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-20i64..20, 1i64..7).prop_map(|(n, d)| rat(n, d)), len)
}

fn density(c: &[Rational], p: &Rational) -> Lagrangian {
    let mut l = Lagrangian::new(p.clone());
    for (k, v) in c.iter().enumerate().take(4) {
        l = l.with_term(k as u32, 0, v.clone());
    }
    l.with_term(1, 1, c[4].clone())
        .with_term(0, 2, c[5].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn residual_is_linear_in_the_coefficients(
        rho in ratio(), r in radius(), x in coeffs(6), y in coeffs(6),
        p in (-5i64..5), q in (-5i64..5),
    ) {
        let t = ExactTorus::from_ratio(&rho, r).unwrap();
        let sum: Vec<Rational> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let lhs = el_residual(&t, &density(&sum, &rat_int(p + q))).unwrap();
        let rhs = el_residual(&t, &density(&x, &rat_int(p))).unwrap()
            + el_residual(&t, &density(&y, &rat_int(q))).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gauss_families_have_the_predicted_freedom(rho in ratio(), r in radius()) {
        let a2 = &rho * &r * &r;
        for (n, free) in [(4u32, 4usize), (5, 6)] {
            let rep = solve_with_gauss(n, &a2, &r, &default_gauss_terms(n)).unwrap();
            let deg = rep.degeneracy.clone().unwrap();
            prop_assume!(!deg.is_degenerate());
            prop_assert!(rep.consistent);
            prop_assert_eq!(rep.free_parameters.len(), free);
            let t = ExactTorus::new(a2.clone(), r.clone()).unwrap();
            let sys = el_system(&t, &rep.lagrangian());
            prop_assert!(sys.substitute(&rep.assignments).iter().all(LinearForm::is_zero));
            let v = verify_solution(&t, &rep, &rep.sample_free_values(), 256).unwrap();
            prop_assert!(v.exact);
        }
    }

    #[test]
    fn pure_families_scale_with_the_radius(r in radius(), n in 2u32..7) {
        // a_i / a_1 carries r^{-(i-1)}, the pressure r^{-(n+1)} relative to a_1
        let unit = solve_pure_h(n, &rat_int(1)).unwrap();
        let scaled = solve_pure_h(n, &r).unwrap();
        prop_assert_eq!(&unit.constraint, &scaled.constraint);
        let a1 = Unknown::coeff(1);
        for i in 2..=n as usize + 1 {
            let u = Unknown::coeff(i);
            let c1 = unit.assignments[&u].coeff(&a1);
            let cr = scaled.assignments[&u].coeff(&a1);
            prop_assert_eq!(cr, c1 / num_traits::pow(r.clone(), i - 1));
        }
        let p = Unknown::pressure();
        prop_assert_eq!(
            scaled.assignments[&p].coeff(&a1),
            unit.assignments[&p].coeff(&a1) / num_traits::pow(r.clone(), n as usize + 1)
        );
    }

    #[test]
    fn weingarten_relation_holds(a in 1.1f64..5.0, r in 0.2f64..3.0, u in 0.0f64..6.3) {
        let t = TorusShape::new(a * r, r).unwrap();
        let (h, k) = t.curvatures(u);
        prop_assert!((k - (2.0 * r * h - 1.0) / (r * r)).abs() < 1e-12 * (1.0 + k.abs()));
        let f = t.fundamental_forms(u);
        prop_assert!((f.mean_curvature() - h).abs() < 1e-12 * (1.0 + h.abs()));
        prop_assert!((f.gaussian_curvature() - k).abs() < 1e-12 * (1.0 + k.abs()));
    }

    #[test]
    fn exact_and_float_tori_agree(rho in ratio(), r in radius()) {
        let t = ExactTorus::from_ratio(&rho, r.clone()).unwrap();
        let s = t.shape();
        prop_assert!((s.r() - to_f64(&r)).abs() < 1e-12 * s.r());
        prop_assert!((s.a() * s.a() - to_f64(t.a2())).abs() < 1e-12 * to_f64(t.a2()));
    }
}
