//! Exact symbolic layer: rational polynomials, truncated Puiseux series,
//! elementary Schur polynomials.

mod poly;
mod series;

pub use poly::{rat, rat_int, rat_text, rat_to_f64, var_order, Exponents, MultiPoly};
pub use series::{puiseux_revert, PuiseuxSeries};

use thiserror::Error;

/// Arbitrary precision rational, always in lowest terms with positive denominator.
pub type Rational = num::BigRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("leading coefficient must be 1, got {0}")]
    NonUnitLeading(String),
    #[error("ramification mismatch: {0}")]
    Ramification(String),
    #[error("incompatible series: {0}")]
    Incompatible(String),
    #[error("key {key} lies below the resolved window (low = {low})")]
    OutsideWindow { key: i64, low: i64 },
    #[error("polynomial is not monic: leading coefficient {0}")]
    NotMonic(String),
    #[error("truncation too coarse: requested key {requested}, reached {achieved}")]
    Insufficient { requested: i64, achieved: i64 },
    #[error("integer overflow in exponent bookkeeping")]
    Overflow,
}

/// Time variable name `t<i>`.
pub fn t(i: usize) -> String {
    format!("t{i}")
}

/// Elementary Schur polynomials `p_0..p_kmax` in `t1..t_var_count`,
/// from `exp(sum t_i z^i) = sum p_l z^l`.
pub fn schur_polynomials(k_max: usize, var_count: usize) -> Vec<MultiPoly> {
    let mut out = vec![MultiPoly::one()];
    for l in 1..=k_max {
        let mut acc = MultiPoly::zero();
        for i in 1..=l.min(var_count) {
            let term = &MultiPoly::var(&t(i)) * &out[l - i];
            acc = &acc + &term.scale(&rat_int(i as i64));
        }
        out.push(acc.scale(&rat(1, l as i64)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schur_low_orders() {
        let p = schur_polynomials(2, 2);
        assert_eq!(p[0], MultiPoly::one());
        assert_eq!(p[1], MultiPoly::var("t1"));
        assert_eq!(p[2].to_text(), "t2 + 1/2*t1^2");
    }
}
