//! Rewrite of `t`-partials of `g = log tau_E` into endpoint operators on the
//! locus `t_1 = 0, t_{>=p} = 0`, using the Virasoro constraints
//!
//! ```text
//! D g = d_1 g + (1/p) sum_{i>p} i t_i d_{i-p} g + Gamma
//! E g = d_{p+1} g + (1/p) sum_i i t_i d_i g + const
//! ```
//!
//! For `n > 0`, `d_p` acts as `-d/dw` and `E` is replaced by `E - w d/dw`.

use std::collections::HashMap;

use crate::algebra::{rat, rat_int, t, MultiPoly};
use crate::potential::topological_tau_log;

use super::diffexpr::{Atom, DiffExpr};
use super::HirotaError;

/// Coefficient of `t_p` in `Gamma` when `n > 0`; its value is never needed
/// because it cancels against the background.
pub const GAMMA_CONSTANT: &str = "c";

/// `Gamma = (1/2p) sum_{i+j=p} (i t_i)(j t_j)`, plus `c t_p` when `n > 0`.
pub fn gamma(p: usize, n: usize) -> MultiPoly {
    let mut g = MultiPoly::zero();
    for i in 1..p {
        let term = &MultiPoly::var(&t(i)).scale(&rat_int(i as i64)) * &MultiPoly::var(&t(p - i)).scale(&rat_int((p - i) as i64));
        g = &g + &term;
    }
    g = g.scale(&rat(1, 2 * p as i64));
    if n > 0 {
        g = &g + &(&MultiPoly::var(GAMMA_CONSTANT) * &MultiPoly::var(&t(p)));
    }
    g
}

/// Restrict a polynomial in the times to `t_1 = 0, t_{>=p} = 0`.
fn on_locus(f: &MultiPoly, p: usize) -> MultiPoly {
    let mut out = f.at_zero(&t(1));
    for v in f.vars() {
        if let Some(i) = v.strip_prefix('t').and_then(|s| s.parse::<usize>().ok()) {
            if i >= p {
                out = out.at_zero(v);
            }
        }
    }
    out
}

/// `E'` applied to the atom `a`: `E a`, minus `w d/dw a` when `n > 0`.
fn dilation_prime(a: &Atom, n: usize) -> DiffExpr {
    let mut e = DiffExpr::atom(a.with_eps(a.eps + 1));
    if n > 0 {
        e = e.sub(&DiffExpr::atom(a.with_w(a.w + 1)).mul_poly(&MultiPoly::var("w")));
    }
    e
}

fn pure(times: &[u32]) -> DiffExpr {
    DiffExpr::atom(Atom::from_times(times))
}

fn unit(i: usize) -> Vec<u32> {
    let mut v = vec![0; i];
    v[i - 1] = 1;
    v
}

/// `d_1 d_{p+1} g`.
fn d1_dp1(p: usize, n: usize) -> DiffExpr {
    let pr = p as i64;
    let dg = Atom::function().with_shift(1);
    let mut e = dilation_prime(&dg, n).scale(&rat_int(pr)).sub(&DiffExpr::atom(dg.clone()));
    let mut quad = MultiPoly::zero();
    for i in 2..p {
        let ti = MultiPoly::var(&t(i)).scale(&rat_int(i as i64));
        let di_d = DiffExpr::atom(Atom::from_times(&unit(i)).with_shift(1));
        let shiftc = MultiPoly::var(&t(p - i)).scale(&rat((i * (p - i)) as i64, pr));
        e = e.sub(&di_d.sub(&DiffExpr::constant(shiftc)).mul_poly(&ti));
        let tj = MultiPoly::var(&t(p - i)).scale(&rat_int((p - i) as i64));
        quad = &quad + &(&ti * &tj);
    }
    e = e.add(&DiffExpr::constant(quad.scale(&rat(1, 2 * pr))));
    e.scale(&rat(1, pr))
}

/// `d_2 d_{p+1} g`, for `p >= 3`.
fn d2_dp1(p: usize, n: usize) -> DiffExpr {
    let d2 = unit(2);
    let mut inner = pure(&d2).scale(&rat_int(2));
    for i in 2..p {
        let mut a = unit(i);
        a.resize(a.len().max(2), 0);
        a[1] += 1;
        inner = inner.add(&pure(&a).mul_poly(&MultiPoly::var(&t(i)).scale(&rat_int(i as i64))));
    }
    dilation_prime(&Atom::from_times(&d2), n).sub(&inner.scale(&rat(1, p as i64)))
}

/// Rewrite one pure `t`-partial of `g`.
fn substitute_atom(a: &Atom, p: usize, n: usize, gam: &MultiPoly) -> Result<DiffExpr, HirotaError> {
    let unsupported = || HirotaError::Unsupported { atom: a.to_text("g"), p };
    if !a.is_pure_time() {
        return Err(unsupported());
    }
    if a.times.len() > p + 1 {
        return Err(unsupported());
    }
    let l1 = a.time(1);
    let lp1 = a.time(p + 1);
    if lp1 > 0 {
        let rest: u32 = a.times.iter().sum::<u32>() - lp1;
        return match (lp1, l1, a.time(2), rest) {
            (1, 1, _, 1) => Ok(d1_dp1(p, n)),
            (1, 0, 1, 1) if p >= 3 => Ok(d2_dp1(p, n)),
            _ => Err(unsupported()),
        };
    }
    let lp = a.time(p);
    if lp > 0 && n == 0 {
        return Ok(DiffExpr::zero());
    }
    let mut main = Atom::function().with_shift(l1).with_w(lp);
    for i in 2..p {
        main = main.with_time(i, a.time(i));
    }
    let sign = if lp.is_multiple_of(2) { 1 } else { -1 };
    let mut e = DiffExpr::atom(main).scale(&rat_int(sign));
    if l1 >= 1 {
        let mut corr = gam.clone();
        for _ in 1..l1 {
            corr = corr.derivative(&t(1));
        }
        for i in 2..=p {
            for _ in 0..a.time(i) {
                corr = corr.derivative(&t(i));
            }
        }
        e = e.sub(&DiffExpr::constant(on_locus(&corr, p)));
    }
    Ok(e)
}

/// Rewrite every `t`-partial of `g` in `e` on the locus, for the `p`-reduced
/// hierarchy with `n` poles.
pub fn virasoro_substitute(e: &DiffExpr, p: usize, n: usize) -> Result<DiffExpr, HirotaError> {
    let gam = gamma(p, n);
    e.map_atoms(|a| Ok(substitute_atom(a, p, n, &gam)?.map_coeffs(|c| on_locus(c, p))))
}

/// Values of the partials of `log tau_0^(p)` on the locus: zero for anything
/// with an endpoint or `w` derivative.
pub fn background(p: usize) -> Result<impl Fn(&Atom) -> MultiPoly, HirotaError> {
    let g0 = topological_tau_log(p)?;
    let cache: HashMap<Vec<u32>, MultiPoly> = HashMap::new();
    let cell = std::cell::RefCell::new(cache);
    Ok(move |a: &Atom| {
        if !a.is_pure_time() {
            return MultiPoly::zero();
        }
        if let Some(v) = cell.borrow().get(&a.times) {
            return v.clone();
        }
        let mut f = g0.clone();
        for (i, e) in a.times.iter().enumerate() {
            for _ in 0..*e {
                f = f.derivative(&t(i + 1));
            }
        }
        let v = on_locus(&f, p);
        cell.borrow_mut().insert(a.times.clone(), v.clone());
        v
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sub(times: &[u32], p: usize) -> String {
        virasoro_substitute(&pure(times), p, 0).unwrap().to_text_with("g")
    }

    #[test]
    fn second_t1_partial() {
        assert_eq!(sub(&[2], 3), "D^2.g - 2/3*t2");
        assert_eq!(sub(&[2], 2), "D^2.g");
    }

    #[test]
    fn third_and_fourth_t1_partials() {
        assert_eq!(sub(&[3], 2), "D^3.g - 1/2");
        assert_eq!(sub(&[3], 3), "D^3.g");
        assert_eq!(sub(&[4], 4), "D^4.g");
    }

    #[test]
    fn p_reduction_kills_dp() {
        assert_eq!(sub(&[1, 1], 2), "0");
    }

    #[test]
    fn t1_tp1_at_p2() {
        assert_eq!(sub(&[1, 0, 1], 2), "E.D.g - 1/2*D.g");
    }

    #[test]
    fn outside_rules_rejected() {
        let e = pure(&[0, 0, 1, 1]);
        assert!(matches!(virasoro_substitute(&e, 3, 0), Err(HirotaError::Unsupported { .. })));
    }
}
