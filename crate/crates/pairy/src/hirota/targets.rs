//! Reference forms of the gap-probability PDEs, written term by term from
//! their standard statements, for comparison with derived equations.

use crate::algebra::{rat, rat_int, t, MultiPoly, Rational};
use crate::potential::v_prime_power_residue;

use super::derive::GapEquation;
use super::diffexpr::{Atom, DiffExpr};
use super::HirotaError;

#[derive(Clone, Debug, PartialEq)]
pub struct Target {
    pub name: String,
    pub description: &'static str,
    pub equation: GapEquation,
    pub p: usize,
    pub n: usize,
    pub expr: DiffExpr,
}

fn q() -> DiffExpr {
    DiffExpr::atom(Atom::function())
}

/// `D^k f`.
fn d(k: u32, f: &DiffExpr) -> DiffExpr {
    (0..k).fold(f.clone(), |acc, _| acc.shift())
}

/// `d_i^k f`.
fn dt(i: usize, k: u32, f: &DiffExpr) -> DiffExpr {
    (0..k).fold(f.clone(), |acc, _| acc.time(i))
}

/// `d/dw^k f`.
fn dw(k: u32, f: &DiffExpr) -> DiffExpr {
    (0..k).fold(f.clone(), |acc, _| acc.w_derivative())
}

fn eps(f: &DiffExpr) -> DiffExpr {
    f.dilation()
}

/// `(E - w d/dw) f`.
fn eps_w(f: &DiffExpr) -> DiffExpr {
    f.dilation().sub(&dw(1, f).mul_poly(&MultiPoly::var("w")))
}

/// `{f, g} = f D g - (D f) g`.
fn bracket(f: &DiffExpr, g: &DiffExpr) -> DiffExpr {
    f.mul(&d(1, g)).sub(&d(1, f).mul(g))
}

fn ti(i: usize) -> MultiPoly {
    MultiPoly::var(&t(i))
}

/// `tau = 2 t_2`.
fn tau() -> MultiPoly {
    ti(2).scale(&rat_int(2))
}

/// `d/dtau^k f` with `tau = 2 t_2`.
fn dtau(k: u32, f: &DiffExpr) -> DiffExpr {
    dt(2, k, f).scale(&rat(1, 1 << k))
}

fn delta(a: usize, b: usize) -> i64 {
    i64::from(a == b)
}

fn sum(terms: Vec<DiffExpr>) -> DiffExpr {
    terms.iter().fold(DiffExpr::zero(), |acc, x| acc.add(x))
}

fn tp(p: usize, i: usize) -> MultiPoly {
    if p > i && i >= 1 {
        ti(p - i)
    } else {
        MultiPoly::zero()
    }
}

/// Y3 equation for general `p`, without `w` terms.
fn y3_general(p: usize) -> DiffExpr {
    let pr = p as i64;
    let dq = d(1, &q());
    let lin = if p == 2 { dq.scale(&rat_int(2)).sub(&eps(&dq).scale(&rat_int(4))) } else { DiffExpr::zero() };
    let rest = if p == 2 {
        DiffExpr::zero()
    } else {
        let bracket = d(1, &dq).mul_poly(&tp(p, 1).scale(&rat(3 * (pr - 1), pr))).add(&dt(3, 1, &dq).scale(&rat_int(1 - delta(3, p))));
        dt(2, 2, &q()).scale(&rat_int(3)).sub(&bracket.scale(&rat_int(4)))
    };
    sum(vec![d(4, &q()), d(2, &q()).pow(2).scale(&rat_int(6)), lin, rest])
}

/// Y4 equation for `p >= 3`, without `w` terms.
fn y4_general(p: usize) -> DiffExpr {
    let pr = p as i64;
    let dq = d(1, &q());
    let d2dq = dt(2, 1, &dq);
    let shifted = d(2, &q()).sub(&DiffExpr::constant(tp(p, 1).scale(&rat(pr - 1, pr))));
    let p3 = if p == 3 {
        dq.sub(&eps(&dq).scale(&rat_int(3))).add(&d(1, &dt(2, 1, &q())).mul_poly(&ti(2).scale(&rat_int(2))))
    } else {
        DiffExpr::zero()
    };
    let other = if p == 3 {
        DiffExpr::zero()
    } else {
        let inner = d(1, &dq).mul_poly(&tp(p, 2).scale(&rat(4 * (pr - 2), pr))).add(&dt(4, 1, &dq).scale(&rat_int(1 - delta(4, p))));
        dt(2, 1, &dt(3, 1, &q())).scale(&rat_int(2)).sub(&inner.scale(&rat_int(3)))
    };
    sum(vec![dt(2, 1, &d(3, &q())), d2dq.mul(&shifted).scale(&rat_int(6)), p3, other])
}

/// `d_2 Y3 - D Y4` equation for `p >= 3`, without `w` terms.
fn combo_general(p: usize) -> DiffExpr {
    let pr = p as i64;
    let d2q = d(2, &q());
    let p3 = if p == 3 {
        eps(&d2q).sub(&dt(2, 1, &d2q).mul_poly(&ti(2).scale(&rat_int(2)))).sub(&d2q.scale(&rat_int(2)))
    } else {
        DiffExpr::zero()
    };
    let other = if p == 3 {
        DiffExpr::zero()
    } else {
        let op = dt(2, 1, &d2q)
            .mul_poly(&tp(p, 1).scale(&rat_int(pr - 1)))
            .sub(&d(1, &d2q).mul_poly(&tp(p, 2).scale(&rat_int(2 * (pr - 2)))))
            .sub(&d(1, &d2q).scale(&rat(pr * (1 - delta(4, p)), 2)));
        dt(2, 1, &dt(3, 1, &d(1, &q())))
            .scale(&rat_int(-2))
            .sub(&op.scale(&rat(2, pr)))
    };
    sum(vec![
        dt(2, 3, &q()),
        bracket(&dt(2, 1, &d(1, &q())), &d2q).scale(&rat_int(2)),
        p3,
        other,
    ])
}

/// `U = D^2 Q - ((p-1)/p) t_{p-1}`.
fn u_shifted(p: usize, shift: Rational) -> DiffExpr {
    d(2, &q()).sub(&DiffExpr::constant(tp(p, 1).scale(&shift)))
}

/// Boussinesq form for `p >= 3`, without `w` terms.
fn boussinesq_general(p: usize) -> DiffExpr {
    let u = u_shifted(p, rat(p as i64 - 1, p as i64));
    sum(vec![
        d(4, &u),
        dt(2, 2, &u).scale(&rat_int(3)),
        d(2, &u.pow(2)).scale(&rat_int(6)),
        dt(3, 1, &d(1, &u)).scale(&rat_int(-4 * (1 - delta(3, p)))),
    ])
}

/// The Y5, (1,4) combination for `p >= 4` as usually stated, with the residue
/// of `V'^((p+2)/2)`. It differs from the derived equation; see the tests.
fn y5_combo_general(p: usize) -> Result<DiffExpr, HirotaError> {
    let pr = p as i64;
    let dq = d(1, &q());
    let d2q = d(2, &q());
    let res = v_prime_power_residue(p, p * (p + 2) / 2)?.derivative(&t(2)).scale(&rat(pr, pr + 2));
    let res = res.at_zero(&t(1));
    let bracket_term = dt(2, 2, &q()).sub(&DiffExpr::constant(res)).mul(&d2q).scale(&rat_int(2));
    let p4 = if p == 4 {
        dq.sub(&eps(&dq).scale(&rat_int(4)))
            .add(&dt(2, 1, &dq).mul_poly(&ti(2).scale(&rat_int(2))))
            .add(&dt(3, 1, &dq).mul_poly(&ti(3).scale(&rat_int(3))))
    } else {
        DiffExpr::zero()
    };
    Ok(sum(vec![
        dt(2, 2, &d2q),
        dt(3, 1, &d(3, &q())).scale(&rat(2, 3)),
        dt(3, 2, &q()).scale(&rat(4, 3)),
        d2q.mul(&dt(3, 1, &dq)).scale(&rat_int(4)),
        dt(2, 1, &dq).pow(2).scale(&rat_int(4)),
        bracket_term,
        dt(3, 1, &dq).scale(&rat(-4 * (pr - 1), pr)),
        d2q.mul_poly(&tp(p, 3).scale(&rat(-12 * (pr - 3) * (1 - delta(4, p)), pr))),
        dt(2, 1, &dq).mul_poly(&tp(p, 2).scale(&rat(-16 * (pr - 2), pr))),
        p4,
        dt(5, 1, &dq).scale(&rat_int(4 * (1 - delta(4, p)) * (1 - delta(5, p)))),
    ]))
}

fn airy_y3() -> DiffExpr {
    let dq = d(1, &q());
    sum(vec![
        d(4, &q()),
        d(2, &q()).pow(2).scale(&rat_int(6)),
        dq.scale(&rat_int(2)).sub(&eps(&dq).scale(&rat_int(4))),
    ])
}

fn airy_outliers_y3() -> DiffExpr {
    let dq = d(1, &q());
    sum(vec![
        d(4, &q()),
        d(2, &q()).pow(2).scale(&rat_int(6)),
        dq.scale(&rat_int(2)).sub(&eps_w(&dq).scale(&rat_int(4))),
        dw(2, &q()).scale(&rat_int(3)),
    ])
}

fn pearcey_y3() -> DiffExpr {
    sum(vec![
        d(4, &q()),
        d(2, &q()).pow(2).scale(&rat_int(6)),
        dtau(2, &q()).scale(&rat_int(12)),
        d(2, &q()).mul_poly(&tau()).scale(&rat_int(-4)),
    ])
}

fn pearcey_y4() -> DiffExpr {
    let dq = d(1, &q());
    let shifted = d(2, &q()).sub(&DiffExpr::constant(tau().scale(&rat(1, 3))));
    let op = dq.sub(&eps(&dq).scale(&rat_int(3))).add(&dtau(1, &dq).mul_poly(&tau()).scale(&rat_int(2)));
    sum(vec![dtau(1, &d(3, &q())).scale(&rat_int(2)), dtau(1, &dq).mul(&shifted).scale(&rat_int(12)), op])
}

fn pearcey_combo() -> DiffExpr {
    let d2q = d(2, &q());
    let op = eps(&d2q).sub(&dtau(1, &d2q).mul_poly(&tau()).scale(&rat_int(2))).sub(&d2q.scale(&rat_int(2)));
    sum(vec![dtau(3, &q()).scale(&rat_int(8)), bracket(&dtau(1, &d(1, &q())), &d2q).scale(&rat_int(4)), op])
}

/// Boussinesq form with `U = D^2 Q - tau/3`.
fn pearcey_boussinesq() -> DiffExpr {
    let u = d(2, &q()).sub(&DiffExpr::constant(tau().scale(&rat(1, 3))));
    sum(vec![d(4, &u), dtau(2, &u).scale(&rat_int(12)), d(2, &u.pow(2)).scale(&rat_int(6))])
}

/// Boussinesq form with `U = D^2 Q - tau/2`, as sometimes printed. It is not
/// `D^2` of the Y3 equation; kept for comparison only.
fn pearcey_boussinesq_half() -> DiffExpr {
    let u = d(2, &q()).sub(&DiffExpr::constant(tau().scale(&rat(1, 2))));
    sum(vec![d(4, &u), dtau(2, &u).scale(&rat_int(12)), d(2, &u.pow(2)).scale(&rat_int(6))])
}

fn pearcey_inliers_y3() -> DiffExpr {
    sum(vec![
        d(4, &q()),
        d(2, &q()).pow(2).scale(&rat_int(6)),
        d(2, &q()).mul_poly(&ti(2).scale(&rat_int(-8))),
        dt(2, 2, &q()).scale(&rat_int(3)),
        dw(1, &d(1, &q())).scale(&rat_int(4)),
    ])
}

fn pearcey_inliers_y4() -> DiffExpr {
    let dq = d(1, &q());
    let op = sum(vec![
        dt(2, 1, &d(2, &dq)),
        dt(2, 1, &dq).mul_poly(&ti(2).scale(&rat_int(-2))),
        eps_w(&dq).scale(&rat_int(-3)),
        dq.clone(),
    ]);
    sum(vec![
        op,
        d(2, &q()).mul(&dt(2, 1, &dq)).scale(&rat_int(6)),
        dt(2, 1, &dw(1, &q())).scale(&rat_int(-2)),
    ])
}

fn pearcey_inliers_combo() -> DiffExpr {
    let d2q = d(2, &q());
    let op = sum(vec![
        eps_w(&d2q),
        dt(2, 1, &d2q).mul_poly(&ti(2).scale(&rat_int(-2))),
        d2q.scale(&rat_int(-2)),
    ]);
    sum(vec![
        op,
        dt(2, 3, &q()),
        bracket(&dt(2, 1, &d(1, &q())), &d2q).scale(&rat_int(2)),
        dt(2, 1, &dw(1, &d(1, &q()))).scale(&rat_int(2)),
    ])
}

fn pearcey_inliers_boussinesq() -> DiffExpr {
    let u = d(2, &q()).sub(&DiffExpr::constant(ti(2).scale(&rat(2, 3))));
    sum(vec![
        d(4, &u),
        dt(2, 2, &u).scale(&rat_int(3)),
        d(2, &u.pow(2)).scale(&rat_int(6)),
        dw(1, &d(1, &u)).scale(&rat_int(4)),
    ])
}

fn named(name: &str, description: &'static str, equation: GapEquation, p: usize, n: usize, expr: DiffExpr) -> Target {
    Target { name: name.to_string(), description, equation, p, n, expr }
}

/// Every stored reference equation.
pub fn targets() -> Result<Vec<Target>, HirotaError> {
    use GapEquation::*;
    let mut v = vec![
        named("airy-y3", "Airy gap probability, Y3", Y3, 2, 0, airy_y3()),
        named("airy-outliers-y3", "Airy with outliers, Y3", Y3, 2, 1, airy_outliers_y3()),
        named("pearcey-y3", "Pearcey gap probability in tau = 2 t2, Y3", Y3, 3, 0, pearcey_y3()),
        named("pearcey-y4", "Pearcey gap probability in tau = 2 t2, Y4", Y4, 3, 0, pearcey_y4()),
        named("pearcey-combo", "Pearcey gap probability in tau = 2 t2, d2 Y3 - D Y4", Y3Y4Combo, 3, 0, pearcey_combo()),
        named("pearcey-boussinesq", "Pearcey gap probability in tau = 2 t2, Boussinesq form", Boussinesq, 3, 0, pearcey_boussinesq()),
        named("pearcey-inliers-y3", "Pearcey with inliers, Y3", Y3, 3, 1, pearcey_inliers_y3()),
        named("pearcey-inliers-y4", "Pearcey with inliers, Y4", Y4, 3, 1, pearcey_inliers_y4()),
        named("pearcey-inliers-combo", "Pearcey with inliers, d2 Y3 - D Y4", Y3Y4Combo, 3, 1, pearcey_inliers_combo()),
        named("pearcey-inliers-boussinesq", "Pearcey with inliers, Boussinesq form", Boussinesq, 3, 1, pearcey_inliers_boussinesq()),
    ];
    for p in 2..=5 {
        v.push(Target { name: format!("y3-p{p}"), description: "Y3 for general p", equation: Y3, p, n: 0, expr: y3_general(p) });
    }
    for p in 3..=4 {
        v.push(Target { name: format!("y4-p{p}"), description: "Y4 for general p", equation: Y4, p, n: 0, expr: y4_general(p) });
        v.push(Target {
            name: format!("combo-p{p}"),
            description: "d2 Y3 - D Y4 for general p",
            equation: Y3Y4Combo,
            p,
            n: 0,
            expr: combo_general(p),
        });
    }
    for p in 3..=5 {
        v.push(Target {
            name: format!("boussinesq-p{p}"),
            description: "Boussinesq form of Y3 for general p",
            equation: Boussinesq,
            p,
            n: 0,
            expr: boussinesq_general(p),
        });
    }
    v.push(named(
        "pearcey-boussinesq-half",
        "Pearcey Boussinesq form with the shift tau/2",
        Boussinesq,
        3,
        0,
        pearcey_boussinesq_half(),
    ));
    v.push(Target {
        name: "y5-combo-p4".into(),
        description: "Y5, (1,4) combination at p = 4",
        equation: Y5Y14Combo,
        p: 4,
        n: 0,
        expr: y5_combo_general(4)?,
    });
    Ok(v)
}

/// Look up a target by name.
pub fn target(name: &str) -> Result<Target, HirotaError> {
    targets()?
        .into_iter()
        .find(|t| t.name == name)
        .ok_or_else(|| HirotaError::UnknownEquation(name.to_string()))
}

/// The reference equation for a derivation, if one is stored. For `n > 0`
/// the `n = 0` form is used when `d_p` cannot appear.
pub fn target_for(equation: GapEquation, p: usize, n: usize) -> Result<Option<Target>, HirotaError> {
    let all = targets()?;
    let exact = all.iter().find(|t| t.equation == equation && t.p == p && t.n == n).cloned();
    if exact.is_some() || n == 0 {
        return Ok(exact);
    }
    let no_dp = matches!((equation, p), (GapEquation::Y3 | GapEquation::Boussinesq, 4..));
    Ok(if no_dp { all.into_iter().find(|t| t.equation == equation && t.p == p && t.n == 0) } else { None })
}
