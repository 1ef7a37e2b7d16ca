//! The deformed potential `V_p(u) = u^(p+1)/(p+1) + sum theta_i u^(i+1)/(i+1)`
//! and the objects it determines: the `theta_i(t)`, the topological tau
//! function and the phase polynomial `P(t)`.

use std::collections::HashMap;

use num::complex::Complex64;
use thiserror::Error;

use crate::algebra::{puiseux_revert, rat, rat_int, t, AlgebraError, MultiPoly, PuiseuxSeries, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("p must be at least 2, got {0}")]
    BadP(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("gradient field is not closed: d{j} b{i} != d{i} b{j}")]
    NotClosed { i: usize, j: usize },
    #[error("theta matching is not triangular at w^(-{0}/p)")]
    NotTriangular(usize),
    #[error("expected {expected} time values, got {got}")]
    TimeCount { expected: usize, got: usize },
}

/// Name of the symbolic `theta_i`.
pub fn theta_name(i: usize) -> String {
    format!("theta{i}")
}

/// Grading `weight(t_m) = p + 1 - m`; any other variable has weight 0.
pub fn t_weight(p: usize) -> impl Fn(&str) -> i64 {
    move |v: &str| match v.strip_prefix('t').and_then(|s| s.parse::<i64>().ok()) {
        Some(m) => p as i64 + 1 - m,
        None => 0,
    }
}

/// `V_p` with `theta_0..theta_{p-2}` as polynomials in `t_1..t_{p-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialVp {
    p: usize,
    theta: Vec<MultiPoly>,
}

impl PotentialVp {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn theta(&self) -> &[MultiPoly] {
        &self.theta
    }

    /// `V_p'(u) = u^p + sum theta_i u^i` as a polynomial in `u` and `t`.
    pub fn v_prime(&self) -> MultiPoly {
        let u = MultiPoly::var("u");
        let mut out = u.pow(self.p as u32);
        for (i, th) in self.theta.iter().enumerate() {
            out = &out + &(th * &u.pow(i as u32));
        }
        out
    }

    /// `V_p(u)` as a polynomial in `u` and `t`.
    pub fn v(&self) -> MultiPoly {
        let u = MultiPoly::var("u");
        let mut out = u.pow(self.p as u32 + 1).scale(&rat(1, self.p as i64 + 1));
        for (i, th) in self.theta.iter().enumerate() {
            out = &out + &(th * &u.pow(i as u32 + 1)).scale(&rat(1, i as i64 + 1));
        }
        out
    }

    /// Evaluate the `theta_i` once at float times `t_1..t_{p-1}`.
    pub fn numeric(&self, times: &[f64]) -> Result<NumericPotential, PotentialError> {
        if times.len() != self.p - 1 {
            return Err(PotentialError::TimeCount { expected: self.p - 1, got: times.len() });
        }
        let vals: HashMap<String, f64> = times.iter().enumerate().map(|(i, &x)| (t(i + 1), x)).collect();
        let theta = self
            .theta
            .iter()
            .map(|th| th.eval_f64(&vals).expect("theta depends only on t_1..t_{p-1}"))
            .collect();
        Ok(NumericPotential { p: self.p, theta })
    }
}

/// `V_p` with float coefficients, for the quadrature hot loops.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericPotential {
    pub p: usize,
    /// `theta_0..theta_{p-2}`.
    pub theta: Vec<f64>,
}

impl NumericPotential {
    /// The undeformed potential `u^(p+1)/(p+1)`.
    pub fn pure(p: usize) -> Self {
        NumericPotential { p, theta: vec![0.0; p - 1] }
    }

    pub fn v(&self, u: Complex64) -> Complex64 {
        let mut acc = u.powu(self.p as u32 + 1) / (self.p as f64 + 1.0);
        let mut upow = u;
        for (i, th) in self.theta.iter().enumerate() {
            acc += upow * (*th / (i as f64 + 1.0));
            upow *= u;
        }
        acc
    }

    /// `sum |theta_i| r^(i+1)/(i+1)`, a bound on the lower order part of `|V(u)|` at `|u| = r`.
    pub fn lower_bound_at(&self, r: f64) -> f64 {
        self.theta
            .iter()
            .enumerate()
            .map(|(i, th)| th.abs() * r.powi(i as i32 + 1) / (i as f64 + 1.0))
            .sum()
    }
}

fn check_p(p: usize) -> Result<(), PotentialError> {
    if p < 2 {
        Err(PotentialError::BadP(p))
    } else {
        Ok(())
    }
}

/// Express `theta_0..theta_{p-2}` in terms of `t_1..t_{p-1}`.
///
/// The series solution `u(w)` of `w = V_p'(u)` is matched against
/// `w^(1/p) + (1/p) sum (p-j) t_{p-j} w^(-j/p)`. The coefficient at `w^(-j/p)`
/// is `-(1/p) theta_{p-1-j}` plus terms in the thetas already solved for.
pub fn solve_theta(p: usize) -> Result<PotentialVp, PotentialError> {
    check_p(p)?;
    let u = MultiPoly::var("u");
    let mut generic = u.pow(p as u32);
    for i in 0..p - 1 {
        generic = &generic + &(&MultiPoly::var(&theta_name(i)) * &u.pow(i as u32));
    }
    let series = puiseux_revert(&generic, "u", -(p as i64 - 1))?;
    let mut solved: HashMap<String, MultiPoly> = HashMap::new();
    for j in 1..p {
        let name = theta_name(p - 1 - j);
        let c = series.coeff(-(j as i64)).expect("reverted to this order").substitute_all(&solved);
        let lin = c.coeff_of(&name, 1);
        if c.degree_in(&name) != 1 || lin != MultiPoly::constant(rat(-1, p as i64)) {
            return Err(PotentialError::NotTriangular(j));
        }
        let rest = c.coeff_of(&name, 0);
        let target = MultiPoly::var(&t(p - j)).scale(&rat((p - j) as i64, p as i64));
        // -(1/p) theta + rest = target
        let th = (&rest - &target).scale(&rat_int(p as i64));
        solved.insert(name, th);
    }
    let theta = (0..p - 1).map(|i| solved.remove(&theta_name(i)).unwrap()).collect();
    Ok(PotentialVp { p, theta })
}

/// `V_p'(u)^q` as a Laurent series in `u`, exact down to `u^(-guard)`.
fn v_prime_power(pot: &PotentialVp, q: Rational, guard: i64) -> Result<PuiseuxSeries, PotentialError> {
    let p = pot.p as i64;
    // The binomial expansion loses `p` keys relative to the input window.
    let s = PuiseuxSeries::from_poly(&pot.v_prime(), "u", -(guard + 2 * p + 2));
    Ok(s.pow(&q)?.truncate(-guard))
}

fn time_vars(p: usize) -> Vec<String> {
    (1..p).map(t).collect()
}

/// Integrate a closed polynomial 1-form `sum b_i dt_i`, with value 0 at the origin.
pub fn integrate_gradient(b: &[MultiPoly], vars: &[String]) -> Result<MultiPoly, PotentialError> {
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            if b[i].derivative(&vars[j]) != b[j].derivative(&vars[i]) {
                return Err(PotentialError::NotClosed { i: i + 1, j: j + 1 });
            }
        }
    }
    // Homotopy to the origin: a term c t^a of b_i contributes c t_i t^a / (|a| + 1).
    let mut f = MultiPoly::zero();
    for (bi, v) in b.iter().zip(vars) {
        for (mono, c) in bi.named_terms() {
            let deg: u32 = mono.values().sum();
            let mut powers: Vec<(&str, u32)> = mono.iter().map(|(k, e)| (k.as_str(), *e)).collect();
            powers.push((v.as_str(), 1));
            f = &f + &MultiPoly::monomial(&powers, c / rat_int(deg as i64 + 1));
        }
    }
    for (bi, v) in b.iter().zip(vars) {
        if f.derivative(v) != *bi {
            return Err(PotentialError::NotClosed { i: 0, j: 0 });
        }
    }
    Ok(f)
}

/// `d log tau_0 / d t_i = -p/(p+i) res_u V_p'(u)^((p+i)/p)` for `i = 1..p-1`.
pub fn topological_tau_gradient(p: usize) -> Result<Vec<MultiPoly>, PotentialError> {
    check_p(p)?;
    let pot = solve_theta(p)?;
    (1..p)
        .map(|i| {
            let s = v_prime_power(&pot, rat((p + i) as i64, p as i64), 3)?;
            Ok(s.residue()?.scale(&rat(-(p as i64), (p + i) as i64)))
        })
        .collect()
}

/// `log tau_0^(p)(t_1..t_{p-1})`, without constant term.
pub fn topological_tau_log(p: usize) -> Result<MultiPoly, PotentialError> {
    let grad = topological_tau_gradient(p)?;
    integrate_gradient(&grad, &time_vars(p))
}

/// True iff `d_1 d_i log tau_0 = res_u V_p'(u)^(i/p)` for all `i = 1..p-1`.
pub fn tau_routes_agree(p: usize) -> Result<bool, PotentialError> {
    let f = topological_tau_log(p)?;
    let pot = solve_theta(p)?;
    for i in 1..p {
        let lhs = f.derivative(&t(1)).derivative(&t(i));
        let rhs = v_prime_power(&pot, rat(i as i64, p as i64), 3)?.residue()?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `b_i(t) = (V_p'(y)^(i/p))_+ at y = 0` for `i = 1..p-1`.
pub fn phase_gradient(p: usize) -> Result<Vec<MultiPoly>, PotentialError> {
    check_p(p)?;
    let pot = solve_theta(p)?;
    (1..p)
        .map(|i| {
            let s = v_prime_power(&pot, rat(i as i64, p as i64), 1)?;
            Ok(s.polynomial_part()?.at_zero("u"))
        })
        .collect()
}

/// The phase polynomial `P(t)` with `dP/dt_i = b_i` and `P(0) = 0`.
pub fn phase_polynomial(p: usize) -> Result<MultiPoly, PotentialError> {
    let grad = phase_gradient(p)?;
    integrate_gradient(&grad, &time_vars(p))
}

/// Polynomial part `(V_p'(y)^(k/p))_+` as a polynomial in `u` and `t`.
pub fn v_prime_power_plus(pot: &PotentialVp, k: usize) -> Result<MultiPoly, PotentialError> {
    Ok(v_prime_power(pot, rat(k as i64, pot.p as i64), 1)?.polynomial_part()?)
}

/// `res_u V_p'(u)^(k/p)`, the coefficient of `u^-1` at infinity.
pub fn v_prime_power_residue(p: usize, k: usize) -> Result<MultiPoly, PotentialError> {
    check_p(p)?;
    let pot = solve_theta(p)?;
    Ok(v_prime_power(&pot, rat(k as i64, p as i64), 3)?.residue()?)
}

/// Check `theta_i` has weight `p - i` for every term.
pub fn theta_is_graded(pot: &PotentialVp) -> bool {
    let w = t_weight(pot.p);
    pot.theta
        .iter()
        .enumerate()
        .all(|(i, th)| th.is_quasi_homogeneous(&w, (pot.p - i) as i64))
}

/// Value of a `t`-polynomial at float times; the numeric counterpart of
/// [`PotentialVp::numeric`] for `P(t)` and friends.
pub fn eval_at_times(f: &MultiPoly, times: &[f64]) -> f64 {
    let vals: HashMap<String, f64> = times.iter().enumerate().map(|(i, &x)| (t(i + 1), x)).collect();
    f.eval_f64(&vals).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_low_p() {
        assert_eq!(solve_theta(2).unwrap().theta()[0].to_text(), "-t1");
        let p3 = solve_theta(3).unwrap();
        assert_eq!(p3.theta()[0].to_text(), "-t1");
        assert_eq!(p3.theta()[1].to_text(), "-2*t2");
        assert_eq!(p3.v().to_text(), "-t1*u - t2*u^2 + 1/4*u^4");
    }

    #[test]
    fn theta_p5() {
        let p5 = solve_theta(5).unwrap();
        assert_eq!(p5.theta()[3].to_text(), "-4*t4");
        assert_eq!(p5.theta()[2].to_text(), "-3*t3");
        assert_eq!(p5.theta()[1].to_text(), "-2*t2 + 16/5*t4^2");
    }

    #[test]
    fn tau_low_p() {
        assert_eq!(topological_tau_log(2).unwrap().to_text(), "-1/12*t1^3");
        assert_eq!(topological_tau_log(3).unwrap().to_text(), "-1/3*t1^2*t2 - 2/27*t2^4");
    }

    #[test]
    fn phase_low_p() {
        assert!(phase_polynomial(2).unwrap().is_zero());
        assert_eq!(phase_polynomial(3).unwrap().to_text(), "-2/3*t2^2");
    }

    #[test]
    fn plus_part_p3() {
        let pot = solve_theta(3).unwrap();
        assert_eq!(v_prime_power_plus(&pot, 2).unwrap().to_text(), "-4/3*t2 + u^2");
    }

    #[test]
    fn rejects_small_p() {
        assert_eq!(solve_theta(1), Err(PotentialError::BadP(1)));
    }
}
