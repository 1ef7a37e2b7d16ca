//! `P(d) tau o tau / (2 tau^2)` written in derivatives of `U = log tau`.

use std::collections::HashMap;

use crate::algebra::{rat, rat_int, MultiPoly, Rational};

use super::bilinear::{sub_indices, HirotaOperator};
use super::diffexpr::{Atom, DiffExpr};

/// Translate a Hirota operator into a polynomial in the partials of
/// `U = log tau`, with unknown `U` printed as `Q`.
///
/// `tau(t+y) tau(t-y) / tau^2 = exp(S)` with `S = sum_{|b| even} 2 U_b y^b / b!`,
/// so each monomial `d^a` contributes `a! [y^a] exp(S) / 2`. Odd monomials give 0.
pub fn to_logtau_pde(op: &HirotaOperator) -> DiffExpr {
    let mut cache: HashMap<Vec<u32>, DiffExpr> = HashMap::new();
    let mut out = DiffExpr::zero();
    for (alpha, c) in op.monomials() {
        if alpha.iter().sum::<u32>() % 2 == 1 {
            continue;
        }
        let coeff = exp_coefficient(&alpha, &mut cache);
        let w = c * factorial_multi(&alpha) * rat(1, 2);
        out = out.add(&coeff.scale(&w));
    }
    out
}

fn factorial_multi(alpha: &[u32]) -> Rational {
    alpha.iter().fold(rat_int(1), |acc, a| acc * rat_int((1..=*a as i64).product()))
}

/// `[y^alpha] exp(S)`, by `alpha_j C(alpha) = sum_{b <= alpha, b_j >= 1} b_j s_b C(alpha - b)`.
fn exp_coefficient(alpha: &[u32], cache: &mut HashMap<Vec<u32>, DiffExpr>) -> DiffExpr {
    let key = trimmed(alpha);
    if let Some(v) = cache.get(&key) {
        return v.clone();
    }
    let value = match key.iter().position(|a| *a > 0) {
        None => DiffExpr::constant(MultiPoly::one()),
        Some(j) => {
            let mut acc = DiffExpr::zero();
            for beta in sub_indices(&key) {
                let size: u32 = beta.iter().sum();
                if beta[j] == 0 || size % 2 == 1 || size < 2 {
                    continue;
                }
                let rest: Vec<u32> = key.iter().zip(&beta).map(|(a, b)| a - b).collect();
                let s_beta = DiffExpr::atom(Atom::from_times(&beta)).scale(&(rat_int(2) / factorial_multi(&beta)));
                let term = s_beta.mul(&exp_coefficient(&rest, cache)).scale(&rat_int(beta[j] as i64));
                acc = acc.add(&term);
            }
            acc.scale(&rat(1, key[j] as i64))
        }
    };
    cache.insert(key, value.clone());
    value
}

fn trimmed(a: &[u32]) -> Vec<u32> {
    let mut v = a.to_vec();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d1_fourth() {
        let op = HirotaOperator::symbol(1).mul(&HirotaOperator::symbol(1));
        let op = op.mul(&op);
        assert_eq!(to_logtau_pde(&op).to_text(), "d1^4.Q + 6*(d1^2.Q)^2");
    }

    #[test]
    fn odd_operators_vanish() {
        assert!(to_logtau_pde(&HirotaOperator::symbol(3)).is_zero());
    }
}
