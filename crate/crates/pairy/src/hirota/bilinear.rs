//! Hirota operators, the two families of KP bilinear equations and the
//! bilinear action on polynomials.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::algebra::{rat, rat_int, schur_polynomials, t, MultiPoly, Rational};

use super::HirotaError;

/// Name of the Hirota symbol paired with `t_i`.
pub fn d_name(i: usize) -> String {
    format!("d{i}")
}

/// Polynomial in the Hirota symbols `d1, d2, ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HirotaOperator(MultiPoly);

impl HirotaOperator {
    pub fn new(poly: MultiPoly) -> Self {
        HirotaOperator(poly)
    }

    pub fn symbol(i: usize) -> Self {
        HirotaOperator(MultiPoly::var(&d_name(i)))
    }

    pub fn poly(&self) -> &MultiPoly {
        &self.0
    }

    /// Terms as `(exponent of d_i for i = 1..=max, coefficient)`.
    pub fn monomials(&self) -> Vec<(Vec<u32>, Rational)> {
        let max = self.max_index();
        self.0
            .named_terms()
            .into_iter()
            .map(|(m, c)| {
                let mut a = vec![0; max];
                for (v, e) in m {
                    a[symbol_index(&v) - 1] = e;
                }
                (a, c)
            })
            .collect()
    }

    /// Largest `i` with `d_i` present.
    pub fn max_index(&self) -> usize {
        self.0.vars().iter().map(|v| symbol_index(v)).max().unwrap_or(0)
    }

    /// Drop the odd-degree part, which vanishes on `f o f`.
    pub fn reduced(&self) -> Self {
        let mut out = MultiPoly::zero();
        for (m, c) in self.0.named_terms() {
            if m.values().sum::<u32>() % 2 == 0 {
                let powers: Vec<(&str, u32)> = m.iter().map(|(v, e)| (v.as_str(), *e)).collect();
                out = &out + &MultiPoly::monomial(&powers, c);
            }
        }
        HirotaOperator(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        HirotaOperator(self.0.scale(c))
    }

    pub fn add(&self, o: &Self) -> Self {
        HirotaOperator(&self.0 + &o.0)
    }

    pub fn sub(&self, o: &Self) -> Self {
        HirotaOperator(&self.0 - &o.0)
    }

    pub fn mul(&self, o: &Self) -> Self {
        HirotaOperator(&self.0 * &o.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_text(&self) -> String {
        self.0.to_text()
    }
}

impl fmt::Display for HirotaOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn symbol_index(v: &str) -> usize {
    v.trim_start_matches('d').parse().expect("operator variables are d<i>")
}

/// `p_k(d1, d2/2, d3/3, ...)`.
pub fn schur_of_symbols(k: usize) -> HirotaOperator {
    let p = schur_polynomials(k, k).pop().expect("k + 1 entries");
    let subs: HashMap<String, MultiPoly> =
        (1..=k).map(|i| (t(i), MultiPoly::var(&d_name(i)).scale(&rat(1, i as i64)))).collect();
    HirotaOperator(p.substitute_all(&subs))
}

/// The two strings of bilinear equations, and the combination mixing them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HirotaKind {
    /// `p_{l+1} - d1 d_l / 2`, the KP hierarchy.
    Y,
    /// `d1 d_l - d2 d_{l-1} / 2 - d1 p_l`.
    Y1,
    /// `p_{l+1} - d2 d_{l-1} / 4 - d1 p_l / 2`, the second string itself.
    Second,
}

/// Bilinear operator of the given kind at level `ell >= 3`.
pub fn hirota_equation(ell: usize, kind: HirotaKind) -> Result<HirotaOperator, HirotaError> {
    if ell < 3 {
        return Err(HirotaError::BadLevel(ell));
    }
    let d = HirotaOperator::symbol;
    let op = match kind {
        HirotaKind::Y => schur_of_symbols(ell + 1).sub(&d(1).mul(&d(ell)).scale(&rat(1, 2))),
        HirotaKind::Y1 => d(1)
            .mul(&d(ell))
            .sub(&d(2).mul(&d(ell - 1)).scale(&rat(1, 2)))
            .sub(&d(1).mul(&schur_of_symbols(ell))),
        HirotaKind::Second => schur_of_symbols(ell + 1)
            .sub(&d(2).mul(&d(ell - 1)).scale(&rat(1, 4)))
            .sub(&d(1).mul(&schur_of_symbols(ell)).scale(&rat(1, 2))),
    };
    Ok(op)
}

/// Coefficients of `y_l` and `y_1 y_{l-1}` in
/// `sum_j p_j(y) p_{j+1}(d~) exp(-sum y_i d_i / 2)`, for `l <= max_ell`.
pub fn bilinear_strings(max_ell: usize) -> (BTreeMap<usize, HirotaOperator>, BTreeMap<usize, HirotaOperator>) {
    let y = |i: usize| MultiPoly::var(&format!("y{i}"));
    let py = schur_polynomials(max_ell + 1, max_ell);
    let ysubs: HashMap<String, MultiPoly> = (1..=max_ell).map(|i| (t(i), y(i))).collect();
    // exp(-s/2) through y-degree 2
    let mut s = MultiPoly::zero();
    for i in 1..=max_ell {
        s = &s + &(&y(i) * &MultiPoly::var(&d_name(i)));
    }
    let half = s.scale(&rat(-1, 2));
    let shift = &(&MultiPoly::one() + &half) + &(&half * &half).scale(&rat(1, 2));
    let mut total = MultiPoly::zero();
    for (j, pj) in py.iter().enumerate() {
        let pj = pj.substitute_all(&ysubs);
        total = &total + &(&(&pj * schur_of_symbols(j + 1).poly()) * &shift);
    }
    let coeff_of = |powers: &[(usize, u32)]| -> HirotaOperator {
        let mut c = total.clone();
        for (i, e) in powers {
            c = c.coeff_of(&format!("y{i}"), *e);
        }
        for i in 1..=max_ell {
            c = c.at_zero(&format!("y{i}"));
        }
        HirotaOperator(c)
    };
    let first = (1..=max_ell).map(|l| (l, coeff_of(&[(l, 1)]))).collect();
    let second = (3..=max_ell).map(|l| (l, coeff_of(&[(1, 1), (l - 1, 1)]))).collect();
    (first, second)
}

/// `P(d_y) f(t + y) g(t - y)` at `y = 0`, with `d_i` acting on `t_i`.
pub fn hirota_apply(op: &HirotaOperator, f: &MultiPoly, g: &MultiPoly) -> MultiPoly {
    let mut fd: HashMap<Vec<u32>, MultiPoly> = HashMap::new();
    let mut gd: HashMap<Vec<u32>, MultiPoly> = HashMap::new();
    let deriv = |cache: &mut HashMap<Vec<u32>, MultiPoly>, base: &MultiPoly, a: &[u32]| -> MultiPoly {
        if let Some(v) = cache.get(a) {
            return v.clone();
        }
        let mut out = base.clone();
        for (i, e) in a.iter().enumerate() {
            for _ in 0..*e {
                out = out.derivative(&t(i + 1));
            }
        }
        cache.insert(a.to_vec(), out.clone());
        out
    };
    let mut total = MultiPoly::zero();
    for (alpha, c) in op.monomials() {
        for gamma in sub_indices(&alpha) {
            let rest: Vec<u32> = alpha.iter().zip(&gamma).map(|(a, g)| a - g).collect();
            let mut w = c.clone();
            for (a, g) in alpha.iter().zip(&gamma) {
                w *= rat_int(binomial(*a, *g));
            }
            if rest.iter().sum::<u32>() % 2 == 1 {
                w = -w;
            }
            let term = &deriv(&mut fd, f, &gamma) * &deriv(&mut gd, g, &rest);
            total = &total + &term.scale(&w);
        }
    }
    total
}

/// All multi-indices `gamma <= alpha` componentwise.
pub(crate) fn sub_indices(alpha: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::with_capacity(alpha.len())];
    for a in alpha {
        let mut next = Vec::with_capacity(out.len() * (*a as usize + 1));
        for prefix in &out {
            for g in 0..=*a {
                let mut v = prefix.clone();
                v.push(g);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

pub(crate) fn binomial(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, j| acc * (n - j) as i64 / (j as i64 + 1))
}

/// Partitions of `n` in non-increasing order.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            prefix.push(k);
            go(n - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Schur function `s_lambda = det(p_{lambda_i - i + j})` in the times.
pub fn schur_function(lambda: &[usize]) -> MultiPoly {
    let n: usize = lambda.iter().sum();
    let p = schur_polynomials(n + lambda.len(), n.max(1));
    let m = lambda.len();
    let entry = |i: usize, j: usize| -> MultiPoly {
        let k = lambda[i] as i64 - i as i64 + j as i64;
        if k < 0 {
            MultiPoly::zero()
        } else {
            p[k as usize].clone()
        }
    };
    let matrix: Vec<Vec<MultiPoly>> = (0..m).map(|i| (0..m).map(|j| entry(i, j)).collect()).collect();
    determinant(&matrix)
}

fn determinant(a: &[Vec<MultiPoly>]) -> MultiPoly {
    match a.len() {
        0 => MultiPoly::one(),
        1 => a[0][0].clone(),
        n => {
            let mut total = MultiPoly::zero();
            for j in 0..n {
                if a[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<MultiPoly>> =
                    a[1..].iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect()).collect();
                let term = &a[0][j] * &determinant(&minor);
                total = if j % 2 == 0 { &total + &term } else { &total - &term };
            }
            total
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d1_squared_bilinear() {
        let f = &MultiPoly::var("t1").pow(3) + &MultiPoly::var("t2");
        let op = HirotaOperator::symbol(1).mul(&HirotaOperator::symbol(1));
        let lhs = hirota_apply(&op, &f, &f);
        let f1 = f.derivative("t1");
        let rhs = (&(&f * &f1.derivative("t1")) - &(&f1 * &f1)).scale(&rat_int(2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn level_two_rejected() {
        assert!(hirota_equation(2, HirotaKind::Y).is_err());
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11]);
    }

    #[test]
    fn schur_two_one() {
        // s_(2,1) = t1^3/3 - t3
        let s = schur_function(&[2, 1]);
        assert_eq!(s.to_text(), "-t3 + 1/3*t1^3");
    }
}
