//! Polynomials in derivatives of one unknown function of the endpoints, the
//! times and `w`.
//!
//! An atom `E^e D^d d2^a2 ... dw^k Q` is the dilation `E = sum a_i d/da_i`
//! applied `e` times to the mixed derivative `D^d d_t^a dw^k Q`, where
//! `D = sum d/da_i` is the shift. `E` commutes with time and `w` derivatives
//! and satisfies `[D, E] = D`. Coefficients are polynomials in the times,
//! `w` and any bookkeeping constants.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num::{One, Signed, Zero};

use crate::algebra::{rat_int, rat_text, t, MultiPoly, Rational};

use super::bilinear::binomial;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    /// Powers of `E`, applied last.
    pub eps: u32,
    /// Powers of the shift `D`.
    pub shift: u32,
    /// `times[i]` is the power of `d/dt_{i+1}`; no trailing zeros.
    pub times: Vec<u32>,
    /// Powers of `d/dw`.
    pub w: u32,
}

impl Atom {
    pub fn function() -> Self {
        Atom::default()
    }

    /// Pure time derivative from exponents of `d/dt_1, d/dt_2, ...`.
    pub fn from_times(times: &[u32]) -> Self {
        let mut a = Atom { times: times.to_vec(), ..Atom::default() };
        a.trim();
        a
    }

    fn trim(&mut self) {
        while self.times.last() == Some(&0) {
            self.times.pop();
        }
    }

    /// Power of `d/dt_i`.
    pub fn time(&self, i: usize) -> u32 {
        self.times.get(i - 1).copied().unwrap_or(0)
    }

    pub fn with_time(&self, i: usize, e: u32) -> Self {
        let mut a = self.clone();
        if a.times.len() < i {
            a.times.resize(i, 0);
        }
        a.times[i - 1] = e;
        a.trim();
        a
    }

    pub fn with_shift(&self, d: u32) -> Self {
        Atom { shift: d, ..self.clone() }
    }

    pub fn with_w(&self, w: u32) -> Self {
        Atom { w, ..self.clone() }
    }

    pub fn with_eps(&self, e: u32) -> Self {
        Atom { eps: e, ..self.clone() }
    }

    /// Total number of derivatives.
    pub fn order(&self) -> u32 {
        self.eps + self.shift + self.w + self.times.iter().sum::<u32>()
    }

    /// Whether only time derivatives are present.
    pub fn is_pure_time(&self) -> bool {
        self.eps == 0 && self.shift == 0 && self.w == 0
    }

    pub fn to_text(&self, f: &str) -> String {
        let pw = |name: &str, e: u32| if e == 1 { name.to_string() } else { format!("{name}^{e}") };
        let mut parts = Vec::new();
        if self.eps > 0 {
            parts.push(pw("E", self.eps));
        }
        if self.shift > 0 {
            parts.push(pw("D", self.shift));
        }
        for (i, e) in self.times.iter().enumerate() {
            if *e > 0 {
                parts.push(pw(&format!("d{}", i + 1), *e));
            }
        }
        if self.w > 0 {
            parts.push(pw("dw", self.w));
        }
        if parts.is_empty() {
            f.to_string()
        } else {
            format!("{}.{f}", parts.join("."))
        }
    }
}

/// Sorted multiset of atoms.
pub type Monomial = Vec<Atom>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiffExpr {
    terms: BTreeMap<Monomial, MultiPoly>,
}

impl DiffExpr {
    pub fn zero() -> Self {
        DiffExpr::default()
    }

    pub fn constant(c: MultiPoly) -> Self {
        let mut e = DiffExpr::zero();
        e.push(Vec::new(), c);
        e
    }

    pub fn atom(a: Atom) -> Self {
        let mut e = DiffExpr::zero();
        e.push(vec![a], MultiPoly::one());
        e
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, MultiPoly)>) -> Self {
        let mut e = DiffExpr::zero();
        for (mut m, c) in terms {
            m.sort();
            e.push(m, c);
        }
        e
    }

    fn push(&mut self, m: Monomial, c: MultiPoly) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(MultiPoly::zero);
        *entry = &*entry + &c;
        if entry.is_zero() {
            let key: Vec<Monomial> = self.terms.iter().filter(|(_, v)| v.is_zero()).map(|(k, _)| k.clone()).collect();
            for k in key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &MultiPoly)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut e = self.clone();
        for (m, c) in &o.terms {
            e.push(m.clone(), c.clone());
        }
        e
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&rat_int(-1)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.mul_poly(&MultiPoly::constant(c.clone()))
    }

    pub fn mul_poly(&self, c: &MultiPoly) -> Self {
        DiffExpr::from_terms(self.terms.iter().map(|(m, v)| (m.clone(), v * c)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut e = DiffExpr::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let mut m: Monomial = ma.iter().chain(mb).cloned().collect();
                m.sort();
                e.push(m, ca * cb);
            }
        }
        e
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(DiffExpr::constant(MultiPoly::one()), |acc, _| acc.mul(self))
    }

    /// Constant part, the coefficient of the empty monomial.
    pub fn constant_part(&self) -> MultiPoly {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(MultiPoly::zero)
    }

    /// Drop the constant part.
    pub fn without_constant(&self) -> Self {
        DiffExpr::from_terms(self.terms.iter().filter(|(m, _)| !m.is_empty()).map(|(m, c)| (m.clone(), c.clone())))
    }

    /// Replace every atom by an expression and expand.
    pub fn map_atoms<E>(&self, mut f: impl FnMut(&Atom) -> Result<DiffExpr, E>) -> Result<Self, E> {
        let mut cache: HashMap<Atom, DiffExpr> = HashMap::new();
        let mut out = DiffExpr::zero();
        for (m, c) in &self.terms {
            let mut prod = DiffExpr::constant(c.clone());
            for a in m {
                let sub = match cache.get(a) {
                    Some(s) => s.clone(),
                    None => {
                        let s = f(a)?;
                        cache.insert(a.clone(), s.clone());
                        s
                    }
                };
                prod = prod.mul(&sub);
            }
            out = out.add(&prod);
        }
        Ok(out)
    }

    /// Map coefficients, keeping monomials.
    pub fn map_coeffs(&self, f: impl Fn(&MultiPoly) -> MultiPoly) -> Self {
        DiffExpr::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Leibniz rule for a derivation acting as `atom_rule` on atoms and as
    /// `coeff_rule` on coefficients.
    fn derivation(&self, atom_rule: impl Fn(&Atom) -> DiffExpr, coeff_rule: impl Fn(&MultiPoly) -> MultiPoly) -> Self {
        let mut out = DiffExpr::zero();
        for (m, c) in &self.terms {
            let dc = coeff_rule(c);
            if !dc.is_zero() {
                out.push(m.clone(), dc);
            }
            for k in 0..m.len() {
                let rest: Monomial = m.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, a)| a.clone()).collect();
                let base = DiffExpr::from_terms([(rest, c.clone())]);
                out = out.add(&base.mul(&atom_rule(&m[k])));
            }
        }
        out
    }

    /// Apply the shift `D`, using `D E^e = (E + 1)^e D`.
    pub fn shift(&self) -> Self {
        self.derivation(
            |a| {
                let mut e = DiffExpr::zero();
                for k in 0..=a.eps {
                    let b = a.with_eps(k).with_shift(a.shift + 1);
                    e.push(vec![b], MultiPoly::int(binomial(a.eps, k)));
                }
                e
            },
            |_| MultiPoly::zero(),
        )
    }

    /// Apply the dilation `E`.
    pub fn dilation(&self) -> Self {
        self.derivation(|a| DiffExpr::atom(a.with_eps(a.eps + 1)), |_| MultiPoly::zero())
    }

    /// Apply `d/dt_i`, coefficients included.
    pub fn time(&self, i: usize) -> Self {
        let v = t(i);
        self.derivation(|a| DiffExpr::atom(a.with_time(i, a.time(i) + 1)), |c| c.derivative(&v))
    }

    /// Apply `d/dw`, coefficients included.
    pub fn w_derivative(&self) -> Self {
        self.derivation(|a| DiffExpr::atom(a.with_w(a.w + 1)), |c| c.derivative("w"))
    }

    /// Divide by the coefficient of the leading monomial when it is a constant.
    pub fn normalized(&self) -> Self {
        match self.ordered_terms().first() {
            Some((_, c)) if c.is_constant() && !c.constant_term().is_zero() => {
                self.scale(&(Rational::one() / c.constant_term()))
            }
            _ => self.clone(),
        }
    }

    /// Monomials by decreasing total order, then decreasing degree.
    pub fn ordered_terms(&self) -> Vec<(&Monomial, &MultiPoly)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        let key = |m: &Monomial| (m.iter().map(Atom::order).sum::<u32>(), m.len());
        v.sort_by(|(a, _), (b, _)| {
            let (oa, la) = key(a);
            let (ob, lb) = key(b);
            ob.cmp(&oa).then(la.cmp(&lb)).then_with(|| b.cmp(a))
        });
        v
    }

    /// Rational `c` with `self = c * other`, if one exists.
    pub fn ratio_to(&self, other: &Self) -> Option<Rational> {
        let (m, c) = other.ordered_terms().first().map(|(m, c)| ((*m).clone(), (*c).clone()))?;
        let mine = self.terms.get(&m)?;
        if !c.is_constant() || !mine.is_constant() {
            return None;
        }
        let r = mine.constant_term() / c.constant_term();
        if *self == other.scale(&r) {
            Some(r)
        } else {
            None
        }
    }

    /// Every variable appearing in a coefficient.
    pub fn coefficient_vars(&self) -> Vec<String> {
        let mut v: Vec<String> = self.terms.values().flat_map(|c| c.vars().to_vec()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Canonical text with `f` as the name of the unknown.
    pub fn to_text_with(&self, f: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.ordered_terms().into_iter().enumerate() {
            let mono = monomial_text(m, f);
            let (neg, coef) = coefficient_text(c);
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            match (coef.is_empty(), mono.is_empty()) {
                (true, true) => out.push('1'),
                (true, false) => out.push_str(&mono),
                (false, true) => out.push_str(&coef),
                (false, false) => {
                    out.push_str(&coef);
                    out.push('*');
                    out.push_str(&mono);
                }
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        self.to_text_with("Q")
    }

    /// Numerical value given atom values and coefficient variable values,
    /// together with the value of every term.
    pub fn evaluate(
        &self,
        atom_value: impl Fn(&Atom) -> f64,
        vars: &HashMap<String, f64>,
    ) -> Option<(f64, Vec<(String, f64)>)> {
        let mut total = 0.0;
        let mut parts = Vec::with_capacity(self.terms.len());
        for (m, c) in self.ordered_terms() {
            let mut v = c.eval_f64(vars)?;
            for a in m {
                v *= atom_value(a);
            }
            total += v;
            let label = monomial_text(m, "Q");
            parts.push((if label.is_empty() { "1".into() } else { label }, v));
        }
        Some((total, parts))
    }
}

fn monomial_text(m: &Monomial, f: &str) -> String {
    let mut groups: Vec<(String, u32)> = Vec::new();
    for a in m {
        let s = a.to_text(f);
        match groups.last_mut() {
            Some((last, k)) if *last == s => *k += 1,
            _ => groups.push((s, 1)),
        }
    }
    groups
        .into_iter()
        .map(|(s, k)| {
            if k == 1 {
                s
            } else if s.contains('.') {
                format!("({s})^{k}")
            } else {
                format!("{s}^{k}")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// Sign and magnitude text of a coefficient; empty text for 1.
fn coefficient_text(c: &MultiPoly) -> (bool, String) {
    if c.is_constant() {
        let q = c.constant_term();
        let a = q.abs();
        return (q.is_negative(), if a.is_one() { String::new() } else { rat_text(&a) });
    }
    if c.len() == 1 {
        let text = c.to_text();
        if let Some(rest) = text.strip_prefix('-') {
            return (true, rest.to_string());
        }
        return (false, text);
    }
    (false, format!("({})", c.to_text()))
}

impl fmt::Display for DiffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn d(k: u32) -> DiffExpr {
        DiffExpr::atom(Atom::function().with_shift(k))
    }

    #[test]
    fn shift_past_dilation() {
        // D (E D Q) = E D^2 Q + D^2 Q
        let e = d(1).dilation().shift();
        assert_eq!(e.to_text(), "E.D^2.Q + D^2.Q");
    }

    #[test]
    fn time_derivative_hits_coefficients() {
        let e = d(2).mul_poly(&MultiPoly::var("t2"));
        assert_eq!(e.time(2).to_text(), "t2*D^2.d2.Q + D^2.Q");
    }

    #[test]
    fn square_prints_as_power() {
        let e = d(2).pow(2).scale(&rat(6, 1)).add(&d(4));
        assert_eq!(e.to_text(), "D^4.Q + 6*(D^2.Q)^2");
    }

    #[test]
    fn ratio_detects_scalar_multiples() {
        let a = d(4).add(&d(2).pow(2).scale(&rat(6, 1)));
        assert_eq!(a.scale(&rat(-3, 2)).ratio_to(&a), Some(rat(-3, 2)));
        assert_eq!(a.ratio_to(&d(4)), None);
    }
}
