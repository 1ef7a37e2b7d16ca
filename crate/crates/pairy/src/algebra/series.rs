//! Truncated Puiseux series in a large variable.
//!
//! A series in `x` with ramification `r` stores coefficients of `x^(k/r)` for
//! integer keys `k`. Everything with key `>= low` is known exactly; terms below
//! `low` are unknown. Arithmetic propagates `low` pessimistically.

use std::collections::BTreeMap;

use num::{Integer, One};

use super::poly::{rat_int, MultiPoly};
use super::{AlgebraError, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxSeries {
    var: String,
    ram: u32,
    low: i64,
    coeffs: BTreeMap<i64, MultiPoly>,
}

impl PuiseuxSeries {
    /// The zero series, known down to key `low`.
    pub fn zero(var: &str, ram: u32, low: i64) -> Self {
        PuiseuxSeries { var: var.to_string(), ram, low, coeffs: BTreeMap::new() }
    }

    /// `c * x^(key/ram)`, exact down to `low`.
    pub fn term(var: &str, ram: u32, key: i64, c: MultiPoly, low: i64) -> Self {
        let mut s = Self::zero(var, ram, low);
        if key >= low && !c.is_zero() {
            s.coeffs.insert(key, c);
        }
        s
    }

    /// Build from explicit coefficients.
    pub fn from_coeffs(var: &str, ram: u32, low: i64, coeffs: impl IntoIterator<Item = (i64, MultiPoly)>) -> Self {
        let mut s = Self::zero(var, ram, low);
        for (k, c) in coeffs {
            if k >= low && !c.is_zero() {
                s.coeffs.insert(k, c);
            }
        }
        s
    }

    /// Split a polynomial by powers of `var`; the result is exact down to `low`.
    pub fn from_poly(p: &MultiPoly, var: &str, low: i64) -> Self {
        let deg = p.degree_in(var);
        Self::from_coeffs(var, 1, low, (0..=deg).map(|k| (k as i64, p.coeff_of(var, k))))
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn ramification(&self) -> u32 {
        self.ram
    }

    /// Lowest key that is known.
    pub fn low(&self) -> i64 {
        self.low
    }

    /// Coefficient at key `k` (exponent `k/ram`); `None` if `k` is below the known window.
    pub fn coeff(&self, k: i64) -> Option<MultiPoly> {
        if k < self.low {
            return None;
        }
        Some(self.coeffs.get(&k).cloned().unwrap_or_else(MultiPoly::zero))
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&i64, &MultiPoly)> {
        self.coeffs.iter()
    }

    /// Highest key with a nonzero coefficient.
    pub fn top(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Drop knowledge below `floor`.
    pub fn truncate(&self, floor: i64) -> Self {
        let low = self.low.max(floor);
        Self::from_coeffs(&self.var, self.ram, low, self.coeffs.iter().map(|(k, c)| (*k, c.clone())))
    }

    fn check_compat(&self, o: &Self) -> Result<(), AlgebraError> {
        if self.var != o.var || self.ram != o.ram {
            return Err(AlgebraError::Incompatible(format!(
                "{}^(1/{}) vs {}^(1/{})",
                self.var, self.ram, o.var, o.ram
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.check_compat(o)?;
        let low = self.low.max(o.low);
        let mut coeffs = self.coeffs.clone();
        for (k, c) in &o.coeffs {
            let e = coeffs.entry(*k).or_insert_with(MultiPoly::zero);
            *e = &*e + c;
        }
        Ok(Self::from_coeffs(&self.var, self.ram, low, coeffs))
    }

    pub fn sub(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.add(&o.scale(&MultiPoly::int(-1)))
    }

    pub fn scale(&self, c: &MultiPoly) -> Self {
        Self::from_coeffs(&self.var, self.ram, self.low, self.coeffs.iter().map(|(k, v)| (*k, v * c)))
    }

    /// Multiply by `x^(shift/ram)`.
    pub fn shift(&self, shift: i64) -> Self {
        Self::from_coeffs(&self.var, self.ram, self.low + shift, self.coeffs.iter().map(|(k, v)| (k + shift, v.clone())))
    }

    pub fn mul(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.check_compat(o)?;
        // An unknown term of one factor pairs with the top of the other.
        let low = match (self.top(), o.top()) {
            (Some(ta), Some(tb)) => (self.low + tb).max(o.low + ta),
            (None, Some(tb)) => self.low + tb,
            (Some(ta), None) => o.low + ta,
            (None, None) => self.low.max(o.low),
        };
        let mut coeffs: BTreeMap<i64, MultiPoly> = BTreeMap::new();
        for (ka, ca) in &self.coeffs {
            for (kb, cb) in &o.coeffs {
                let k = ka + kb;
                if k < low {
                    continue;
                }
                let e = coeffs.entry(k).or_insert_with(MultiPoly::zero);
                *e = &*e + &(ca * cb);
            }
        }
        Ok(Self::from_coeffs(&self.var, self.ram, low, coeffs))
    }

    /// Generalized binomial power `s^q`.
    ///
    /// The leading coefficient must be exactly 1 and the leading key times `q`
    /// must be an integer.
    pub fn pow(&self, q: &Rational) -> Result<Self, AlgebraError> {
        let m = self.top().ok_or_else(|| AlgebraError::NonUnitLeading("zero series".into()))?;
        let lead = &self.coeffs[&m];
        if *lead != MultiPoly::one() {
            return Err(AlgebraError::NonUnitLeading(lead.to_text()));
        }
        let shift = q * rat_int(m);
        if !shift.denom().is_one() {
            return Err(AlgebraError::Ramification(format!(
                "exponent {}*{} needs ramification beyond {}",
                m, q, self.ram
            )));
        }
        let shift: i64 = shift.to_integer().try_into().map_err(|_| AlgebraError::Overflow)?;
        // s = x^m (1 + y), keys of y are negative.
        let mut y = self.shift(-m);
        y.coeffs.remove(&0);
        let one = Self::term(&self.var, self.ram, 0, MultiPoly::one(), y.low);
        let mut result = one.clone();
        if let Some(ty) = y.top() {
            let kmax = if y.low >= 0 { 0 } else { Integer::div_floor(&y.low, &ty) };
            let mut ypow = one.clone();
            let mut binom = Rational::one();
            for k in 1..=kmax {
                ypow = ypow.mul(&y)?;
                binom = binom * (q - rat_int(k - 1)) / rat_int(k);
                result = result.add(&ypow.scale(&MultiPoly::constant(binom.clone())))?;
            }
        }
        let result = result.truncate(y.low);
        Ok(result.shift(shift))
    }

    /// Coefficient of `x^{-1}`.
    pub fn residue(&self) -> Result<MultiPoly, AlgebraError> {
        let k = -(self.ram as i64);
        self.coeff(k).ok_or(AlgebraError::OutsideWindow { key: k, low: self.low })
    }

    /// Polynomial part: nonnegative integer exponents, as a polynomial in `var`.
    pub fn polynomial_part(&self) -> Result<MultiPoly, AlgebraError> {
        if self.low > 0 {
            return Err(AlgebraError::OutsideWindow { key: 0, low: self.low });
        }
        let mut out = MultiPoly::zero();
        for (k, c) in &self.coeffs {
            if *k >= 0 && k % self.ram as i64 == 0 {
                let e = (k / self.ram as i64) as u32;
                out = &out + &(c * &MultiPoly::monomial(&[(&self.var, e)], Rational::one()));
            }
        }
        Ok(out)
    }

    pub fn is_zero_to_truncation(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Solve `v_prime(u) = w` for `u` as a series in `w^{1/p}` around `w = infinity`.
///
/// `v_prime` must be monic of degree `p` in `u`. The result is known for all keys
/// `>= order` (exponents `order/p`).
pub fn puiseux_revert(v_prime: &MultiPoly, u: &str, order: i64) -> Result<PuiseuxSeries, AlgebraError> {
    let p = v_prime.degree_in(u);
    if p == 0 {
        return Err(AlgebraError::NotMonic("degree 0".into()));
    }
    if v_prime.coeff_of(u, p) != MultiPoly::one() {
        return Err(AlgebraError::NotMonic(v_prime.coeff_of(u, p).to_text()));
    }
    let pi = p as i64;
    let floor = order - 1;
    let lower: Vec<MultiPoly> = (0..p).map(|i| v_prime.coeff_of(u, i)).collect();
    // Exact helpers must stay known well below `floor`, since products shift windows by the other factor's top key.
    let exact = floor - 2 * pi - 2;
    let s = PuiseuxSeries::term("w", p, 1, MultiPoly::one(), exact);
    let winv = PuiseuxSeries::term("w", p, -pi, MultiPoly::one(), exact);
    let one = PuiseuxSeries::term("w", p, 0, MultiPoly::one(), exact);
    let exp = Rational::new(1.into(), p.into());
    let mut uu = s.truncate(1);
    let max_iter = (2 * (pi - order).max(1) + 4) as usize;
    for _ in 0..max_iter {
        if uu.low() <= order {
            return Ok(uu.truncate(order));
        }
        // u = s * (1 - sum_i c_i u^i / w)^{1/p}
        let mut acc = PuiseuxSeries::zero("w", p, floor);
        let mut upow = one.clone();
        for c in &lower {
            if !c.is_zero() {
                acc = acc.add(&upow.scale(c))?;
            }
            upow = upow.mul(&uu)?.truncate(floor);
        }
        let inner = one.sub(&acc.mul(&winv)?)?.truncate(floor);
        let next = s.mul(&inner.pow(&exp)?)?.truncate(floor);
        if next.low() >= uu.low() {
            return Err(AlgebraError::Insufficient { requested: order, achieved: uu.low() });
        }
        uu = next;
    }
    if uu.low() <= order {
        Ok(uu.truncate(order))
    } else {
        Err(AlgebraError::Insufficient { requested: order, achieved: uu.low() })
    }
}

#[cfg(test)]
mod tests {
    use super::super::poly::rat;
    use super::*;

    fn u() -> MultiPoly {
        MultiPoly::var("u")
    }

    #[test]
    fn sqrt_of_square() {
        let s = PuiseuxSeries::from_poly(&u().pow(2), "u", -6);
        let r = s.pow(&rat(1, 2)).unwrap();
        assert_eq!(r.coeff(1).unwrap(), MultiPoly::one());
        assert!(r.coeffs().all(|(k, _)| *k == 1));
    }

    #[test]
    fn three_halves_binomial() {
        let t1 = MultiPoly::var("t1");
        let s = PuiseuxSeries::from_poly(&(&u().pow(2) - &t1), "u", -8);
        let r = s.pow(&rat(3, 2)).unwrap();
        assert_eq!(r.coeff(3).unwrap(), MultiPoly::one());
        assert_eq!(r.coeff(1).unwrap(), t1.scale(&rat(-3, 2)));
        assert_eq!(r.coeff(-1).unwrap(), t1.pow(2).scale(&rat(3, 8)));
        assert_eq!(r.residue().unwrap(), t1.pow(2).scale(&rat(3, 8)));
    }

    #[test]
    fn residue_outside_window() {
        let s = PuiseuxSeries::from_poly(&u(), "u", 0);
        assert!(s.residue().is_err());
    }

    #[test]
    fn revert_pure_power() {
        let r = puiseux_revert(&u().pow(2), "u", -5).unwrap();
        assert_eq!(r.coeff(1).unwrap(), MultiPoly::one());
        assert!(r.coeffs().all(|(k, _)| *k == 1));
    }

    #[test]
    fn revert_leading_correction() {
        let th = MultiPoly::var("theta0");
        let r = puiseux_revert(&(&u().pow(2) + &th), "u", -3).unwrap();
        assert_eq!(r.coeff(-1).unwrap(), th.scale(&rat(-1, 2)));
    }
}
