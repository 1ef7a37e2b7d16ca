use pairy::algebra::{rat, rat_int, schur_polynomials, t, MultiPoly};
use pairy::hirota::{
    bilinear_strings, derive_gap_pde, hirota_apply, hirota_equation, partitions, printed_logtau_row, printed_operator_row,
    schur_function, target, target_for, GapEquation, HirotaKind, TableRow,
};
use pairy::potential::{solve_theta, t_weight, tau_routes_agree, theta_is_graded, topological_tau_log};
use proptest::prelude::*;

fn poly_from(coeffs: &[i64], names: &[&str]) -> MultiPoly {
    coeffs.iter().enumerate().fold(MultiPoly::zero(), |acc, (i, c)| {
        let e0 = (i % 3) as u32;
        let e1 = (i / 3) as u32;
        &acc + &MultiPoly::monomial(&[(names[0], e0), (names[1], e1)], rat_int(*c))
    })
}

proptest! {
    #[test]
    fn products_distribute(a in prop::collection::vec(-5i64..5, 6), b in prop::collection::vec(-5i64..5, 6), c in prop::collection::vec(-5i64..5, 6)) {
        let (a, b, c) = (poly_from(&a, &["t1", "t2"]), poly_from(&b, &["t1", "t2"]), poly_from(&c, &["t2", "t3"]));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn derivative_obeys_leibniz(a in prop::collection::vec(-5i64..5, 6), b in prop::collection::vec(-5i64..5, 6)) {
        let (a, b) = (poly_from(&a, &["t1", "t2"]), poly_from(&b, &["t1", "t2"]));
        let lhs = (&a * &b).derivative("t1");
        let rhs = &(&a.derivative("t1") * &b) + &(&a * &b.derivative("t1"));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn schur_polynomials_shift_under_time_derivatives(l in 1usize..8, i in 1usize..5) {
        let p = schur_polynomials(8, 5);
        let expected = if i <= l { p[l - i].clone() } else { MultiPoly::zero() };
        prop_assert_eq!(p[l].derivative(&t(i)), expected);
    }
}

#[test]
fn schur_functions_solve_kp_at_weight_six() {
    let ops: Vec<_> = (3..=5).map(|l| hirota_equation(l, HirotaKind::Y).unwrap()).collect();
    for lambda in partitions(6) {
        let s = schur_function(&lambda);
        for op in &ops {
            assert!(hirota_apply(op, &s, &s).is_zero(), "{lambda:?}");
        }
    }
}

#[test]
fn non_tau_polynomial_fails_kp() {
    // t1^3 + t3 is not in the Schur family.
    let f = &MultiPoly::var("t1").pow(3) + &MultiPoly::var("t3");
    let y3 = hirota_equation(3, HirotaKind::Y).unwrap();
    assert!(!hirota_apply(&y3, &f, &f).is_zero());
}

#[test]
fn strings_cover_levels() {
    let (y, second) = bilinear_strings(5);
    assert!((3..=5).all(|l| y.contains_key(&l)));
    assert!(second.contains_key(&5));
}

#[test]
fn tables_agree_with_strings() {
    for row in TableRow::ALL {
        assert!(row.operator().unwrap().sub(&printed_operator_row(row)).is_zero(), "{row}");
        assert!(row.logtau().unwrap().sub(&printed_logtau_row(row)).is_zero(), "{row}");
    }
}

#[test]
fn potentials_are_graded_and_tau_routes_agree() {
    for p in 2..=5 {
        let pot = solve_theta(p).unwrap();
        assert!(theta_is_graded(&pot), "p={p}");
        assert!(tau_routes_agree(p).unwrap(), "p={p}");
        let f = topological_tau_log(p).unwrap();
        let degrees = f.weighted_degrees(t_weight(p));
        assert!(degrees.windows(2).all(|w| w[0] == w[1]), "p={p}: {degrees:?}");
    }
    assert_eq!(solve_theta(4).unwrap().theta()[0].to_text(), "-t1 + 9/8*t3^2");
}

#[test]
fn derivations_match_stored_forms() {
    for (name, eq, p, n) in [
        ("airy-y3", GapEquation::Y3, 2, 0),
        ("airy-outliers-y3", GapEquation::Y3, 2, 1),
        ("pearcey-y3", GapEquation::Y3, 3, 0),
        ("pearcey-y4", GapEquation::Y4, 3, 0),
        ("pearcey-boussinesq", GapEquation::Boussinesq, 3, 0),
        ("pearcey-inliers-y3", GapEquation::Y3, 3, 1),
        ("pearcey-inliers-y4", GapEquation::Y4, 3, 1),
        ("y4-p4", GapEquation::Y4, 4, 0),
    ] {
        let d = derive_gap_pde(eq, p, n).unwrap();
        assert!(d.matches(&target(name).unwrap().expr), "{name}: {}", d.canonical_text());
    }
}

#[test]
fn boussinesq_is_second_shift_of_y3() {
    for (p, n) in [(3, 0), (3, 1), (4, 0)] {
        let y3 = derive_gap_pde(GapEquation::Y3, p, n).unwrap();
        let b = derive_gap_pde(GapEquation::Boussinesq, p, n).unwrap();
        assert!(b.matches(&y3.expr.shift().shift()), "p={p} n={n}");
    }
}

#[test]
fn half_shift_boussinesq_differs_by_one_term() {
    let d = derive_gap_pde(GapEquation::Boussinesq, 3, 0).unwrap();
    let half = target("pearcey-boussinesq-half").unwrap();
    assert!(!d.matches(&half.expr));
    let diff = d.expr.normalized().sub(&half.expr.normalized());
    // The shift enters through U = D^2 Q - c t2, so only t2 D^4 Q is off.
    assert_eq!(diff.to_text(), "4*t2*D^4.Q");
    // The lookup prefers the form that matches.
    assert_eq!(target_for(GapEquation::Boussinesq, 3, 0).unwrap().unwrap().name, "pearcey-boussinesq");
}

#[test]
fn unsupported_derivation_is_an_error() {
    assert!(derive_gap_pde(GapEquation::Y4, 2, 0).is_err());
    assert!(target("no-such-equation").is_err());
    assert_eq!(rat(2, 4), rat(1, 2));
}
