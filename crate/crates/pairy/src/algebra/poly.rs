//! Sparse multivariate polynomials over the rationals.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, One, Signed, ToPrimitive, Zero};

use super::Rational;

/// Exponent vector, indexed like the owning polynomial's variable list.
pub type Exponents = Vec<u32>;

/// Polynomial with exact rational coefficients.
///
/// Variables are kept sorted by [`var_order`] and unused variables are dropped,
/// so structural equality is mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<Exponents, Rational>,
}

/// Canonical variable order: alphabetic prefix, then numeric suffix.
pub fn var_order(a: &str, b: &str) -> Ordering {
    fn split(s: &str) -> (&str, Option<u64>) {
        let idx = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
        let (head, tail) = s.split_at(idx);
        (head, tail.parse().ok())
    }
    let (ha, na) = split(a);
    let (hb, nb) = split(b);
    ha.cmp(hb).then(na.cmp(&nb)).then(a.cmp(b))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Text form of a rational: `n` or `n/d`.
pub fn rat_text(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rat_to_f64(q: &Rational) -> f64 {
    let n = q.numer().to_f64().unwrap_or(f64::NAN);
    let d = q.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly { vars: Vec::new(), terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        MultiPoly { vars: Vec::new(), terms }
    }

    pub fn int(n: i64) -> Self {
        Self::constant(rat_int(n))
    }

    pub fn var(name: &str) -> Self {
        Self::monomial(&[(name, 1)], Rational::one())
    }

    /// `c * prod(name^exp)`.
    pub fn monomial(powers: &[(&str, u32)], c: Rational) -> Self {
        let mut acc: BTreeMap<String, u32> = BTreeMap::new();
        for (name, e) in powers {
            *acc.entry(name.to_string()).or_insert(0) += e;
        }
        let mut vars: Vec<String> = acc.keys().cloned().collect();
        vars.sort_by(|a, b| var_order(a, b));
        let exps: Exponents = vars.iter().map(|v| acc[v]).collect();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        MultiPoly { vars, terms }.normalized()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    /// Terms as `(var -> exponent, coefficient)` pairs.
    pub fn named_terms(&self) -> Vec<(BTreeMap<String, u32>, Rational)> {
        self.terms
            .iter()
            .map(|(e, c)| {
                let m = self
                    .vars
                    .iter()
                    .zip(e)
                    .filter(|(_, &k)| k > 0)
                    .map(|(v, &k)| (v.clone(), k))
                    .collect();
                (m, c.clone())
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn constant_term(&self) -> Rational {
        let zero = vec![0; self.vars.len()];
        self.terms.get(&zero).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        match self.var_index(var) {
            Some(i) => self.terms.keys().map(|e| e[i]).max().unwrap_or(0),
            None => 0,
        }
    }

    fn var_index(&self, var: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }

    fn normalized(mut self) -> Self {
        self.terms.retain(|_, c| !c.is_zero());
        let n = self.vars.len();
        let used: Vec<bool> = (0..n).map(|i| self.terms.keys().any(|e| e[i] > 0)).collect();
        if used.iter().all(|&u| u) {
            return self;
        }
        let vars = self
            .vars
            .iter()
            .zip(&used)
            .filter(|(_, &u)| u)
            .map(|(v, _)| v.clone())
            .collect();
        let terms = self
            .terms
            .into_iter()
            .map(|(e, c)| (e.into_iter().zip(&used).filter(|(_, &u)| u).map(|(k, _)| k).collect(), c))
            .collect();
        MultiPoly { vars, terms }
    }

    /// Re-key this polynomial's terms over a superset of its variables.
    fn lift(&self, vars: &[String]) -> BTreeMap<Exponents, Rational> {
        let idx: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).expect("variable missing from union"))
            .collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut out = vec![0; vars.len()];
                for (k, &i) in idx.iter().enumerate() {
                    out[i] = e[k];
                }
                (out, c.clone())
            })
            .collect()
    }

    fn union_vars(&self, other: &Self) -> Vec<String> {
        let mut vars = self.vars.clone();
        for v in &other.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        vars.sort_by(|a, b| var_order(a, b));
        vars
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to `var`.
    pub fn derivative(&self, var: &str) -> Self {
        let Some(i) = self.var_index(var) else {
            return Self::zero();
        };
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            terms.insert(e2, c * rat_int(e[i] as i64));
        }
        MultiPoly { vars: self.vars.clone(), terms }.normalized()
    }

    /// Replace `var` by the polynomial `value`.
    pub fn substitute(&self, var: &str, value: &MultiPoly) -> Self {
        let Some(i) = self.var_index(var) else {
            return self.clone();
        };
        let mut powers: Vec<MultiPoly> = vec![Self::one()];
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let k = e[i] as usize;
            while powers.len() <= k {
                let next = powers.last().unwrap() * value;
                powers.push(next);
            }
            let mut rest = e.clone();
            rest[i] = 0;
            let rest = MultiPoly { vars: self.vars.clone(), terms: BTreeMap::from([(rest, c.clone())]) }
                .normalized();
            out = &out + &(&rest * &powers[k]);
        }
        out
    }

    /// Simultaneous substitution of several variables.
    pub fn substitute_all(&self, values: &HashMap<String, MultiPoly>) -> Self {
        let mut out = Self::zero();
        for (named, c) in self.named_terms() {
            let mut term = Self::constant(c);
            for (v, k) in named {
                let factor = match values.get(&v) {
                    Some(p) => p.pow(k),
                    None => Self::monomial(&[(&v, k)], Rational::one()),
                };
                term = &term * &factor;
            }
            out = &out + &term;
        }
        out
    }

    /// Set `var` to zero.
    pub fn at_zero(&self, var: &str) -> Self {
        self.substitute(var, &Self::zero())
    }

    /// Coefficient of `var^k`, as a polynomial in the remaining variables.
    pub fn coeff_of(&self, var: &str, k: u32) -> Self {
        let Some(i) = self.var_index(var) else {
            return if k == 0 { self.clone() } else { Self::zero() };
        };
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[i] == k)
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2[i] = 0;
                (e2, c.clone())
            })
            .collect();
        MultiPoly { vars: self.vars.clone(), terms }.normalized()
    }

    /// Evaluate with rational values; missing variables are an error.
    pub fn eval_rational(&self, values: &HashMap<String, Rational>) -> Option<Rational> {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (v, &k) in self.vars.iter().zip(e) {
                if k > 0 {
                    let x = values.get(v)?;
                    for _ in 0..k {
                        term *= x;
                    }
                }
            }
            acc += term;
        }
        Some(acc)
    }

    /// Floating point evaluation; missing variables are an error.
    pub fn eval_f64(&self, values: &HashMap<String, f64>) -> Option<f64> {
        let xs: Option<Vec<f64>> = self.vars.iter().map(|v| values.get(v).copied()).collect();
        let xs = xs?;
        Some(
            self.terms
                .iter()
                .map(|(e, c)| {
                    let mut t = rat_to_f64(c);
                    for (x, &k) in xs.iter().zip(e) {
                        t *= x.powi(k as i32);
                    }
                    t
                })
                .sum(),
        )
    }

    /// Weighted degrees of all terms.
    pub fn weighted_degrees(&self, weight: impl Fn(&str) -> i64) -> Vec<i64> {
        let w: Vec<i64> = self.vars.iter().map(|v| weight(v)).collect();
        self.terms.keys().map(|e| e.iter().zip(&w).map(|(&k, &wi)| k as i64 * wi).sum()).collect()
    }

    /// True if every term has weighted degree `target`.
    pub fn is_quasi_homogeneous(&self, weight: impl Fn(&str) -> i64, target: i64) -> bool {
        self.weighted_degrees(weight).into_iter().all(|d| d == target)
    }

    /// Terms in canonical order: ascending total degree, then lexicographically
    /// descending exponents.
    fn sorted_terms(&self) -> Vec<(&Exponents, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        v
    }

    /// Canonical text, e.g. `-1/3*t1^2*t2 - 2/27*t2^4`.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = self
                .vars
                .iter()
                .zip(e)
                .filter(|(_, &p)| p > 0)
                .map(|(v, &p)| if p == 1 { v.clone() } else { format!("{v}^{p}") })
                .collect();
            if mono.is_empty() {
                out.push_str(&rat_text(&a));
            } else if a.is_one() {
                out.push_str(&mono.join("*"));
            } else {
                out.push_str(&rat_text(&a));
                out.push('*');
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl From<Rational> for MultiPoly {
    fn from(c: Rational) -> Self {
        MultiPoly::constant(c)
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let vars = self.union_vars(rhs);
        let mut terms = self.lift(&vars);
        for (e, c) in rhs.lift(&vars) {
            *terms.entry(e).or_insert_with(Rational::zero) += c;
        }
        MultiPoly { vars, terms }.normalized()
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        if self.is_zero() || rhs.is_zero() {
            return MultiPoly::zero();
        }
        let vars = self.union_vars(rhs);
        let a = self.lift(&vars);
        let b = rhs.lift(&vars);
        let mut terms: BTreeMap<Exponents, Rational> = BTreeMap::new();
        for (ea, ca) in &a {
            for (eb, cb) in &b {
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *terms.entry(e).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        MultiPoly { vars, terms }.normalized()
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form() {
        let t1 = MultiPoly::var("t1");
        let t2 = MultiPoly::var("t2");
        let p = &(&t1.pow(2) * &t2).scale(&rat(-1, 3)) - &t2.pow(4).scale(&rat(2, 27));
        assert_eq!(p.to_text(), "-1/3*t1^2*t2 - 2/27*t2^4");
        assert_eq!(MultiPoly::zero().to_text(), "0");
        assert_eq!((&t1 + &MultiPoly::int(1)).to_text(), "1 + t1");
    }

    #[test]
    fn var_sorting() {
        assert_eq!(var_order("t10", "t9"), Ordering::Greater);
        let p = &MultiPoly::var("t10") * &MultiPoly::var("t2");
        assert_eq!(p.vars(), ["t2", "t10"]);
    }

    #[test]
    fn unused_vars_dropped() {
        let t1 = MultiPoly::var("t1");
        let d = &t1 - &t1;
        assert!(d.is_zero());
        assert_eq!(d, MultiPoly::zero());
        assert_eq!(t1.derivative("t1"), MultiPoly::one());
    }

    #[test]
    fn substitution() {
        let x = MultiPoly::var("x");
        let p = &x.pow(2) + &x;
        let q = p.substitute("x", &(&MultiPoly::var("y") + &MultiPoly::one()));
        // (y+1)^2 + (y+1) = y^2 + 3y + 2
        assert_eq!(q.to_text(), "2 + 3*y + y^2");
    }
}
