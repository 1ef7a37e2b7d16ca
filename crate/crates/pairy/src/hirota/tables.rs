//! The reduced Hirota operators at levels 3 to 5 and their `log tau` forms,
//! in the normalization used by the standard tables.

use std::fmt;

use crate::algebra::{rat, rat_int, MultiPoly, Rational};

use super::bilinear::{d_name, hirota_equation, HirotaKind, HirotaOperator};
use super::diffexpr::{Atom, DiffExpr};
use super::logtau::to_logtau_pde;
use super::HirotaError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TableRow {
    Y3,
    Y4,
    Y5,
    /// Listed under the mixed `(1,4)` name; it is the second string at level 5.
    Y14,
    /// The combination free of `d1^6`.
    Combo,
}

impl TableRow {
    pub const ALL: [TableRow; 5] = [TableRow::Y3, TableRow::Y4, TableRow::Y5, TableRow::Y14, TableRow::Combo];

    /// The row's operator built from the bilinear strings, scaled to the
    /// table normalization.
    pub fn operator(self) -> Result<HirotaOperator, HirotaError> {
        let y = |l| hirota_equation(l, HirotaKind::Y).map(|o| o.reduced());
        let s5 = || hirota_equation(5, HirotaKind::Second).map(|o| o.reduced());
        Ok(match self {
            TableRow::Y3 => y(3)?.scale(&rat_int(24)),
            TableRow::Y4 => y(4)?.scale(&rat_int(12)),
            TableRow::Y5 => y(5)?.scale(&rat_int(2)),
            TableRow::Y14 => s5()?,
            TableRow::Combo => s5()?.scale(&rat_int(4)).add(&y(5)?.scale(&rat_int(8))),
        })
    }

    /// Factor between the table's `log tau` row and the translation of the
    /// table's operator row.
    pub fn logtau_scale(self) -> Rational {
        match self {
            TableRow::Y3 | TableRow::Y4 => rat_int(1),
            TableRow::Y5 => rat_int(36),
            TableRow::Y14 => rat_int(-72),
            TableRow::Combo => rat_int(2),
        }
    }

    /// The `log tau` PDE of the row, derived from [`TableRow::operator`].
    pub fn logtau(self) -> Result<DiffExpr, HirotaError> {
        Ok(to_logtau_pde(&self.operator()?).scale(&self.logtau_scale()))
    }
}

impl fmt::Display for TableRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TableRow::Y3 => "Y3",
            TableRow::Y4 => "Y4",
            TableRow::Y5 => "Y5",
            TableRow::Y14 => "Y14",
            TableRow::Combo => "4Y14+10Y5",
        };
        f.write_str(s)
    }
}

fn op_term(powers: &[(usize, u32)], c: Rational) -> MultiPoly {
    let names: Vec<(String, u32)> = powers.iter().map(|(i, e)| (d_name(*i), *e)).collect();
    let refs: Vec<(&str, u32)> = names.iter().map(|(s, e)| (s.as_str(), *e)).collect();
    MultiPoly::monomial(&refs, c)
}

fn op(terms: &[(&[(usize, u32)], Rational)]) -> HirotaOperator {
    HirotaOperator::new(terms.iter().fold(MultiPoly::zero(), |acc, (m, c)| &acc + &op_term(m, c.clone())))
}

/// Operator rows as tabulated.
pub fn printed_operator_row(row: TableRow) -> HirotaOperator {
    match row {
        TableRow::Y3 => op(&[(&[(1, 1), (3, 1)], rat_int(-4)), (&[(2, 2)], rat_int(3)), (&[(1, 4)], rat_int(1))]),
        TableRow::Y4 => op(&[(&[(1, 1), (4, 1)], rat_int(-3)), (&[(2, 1), (3, 1)], rat_int(2)), (&[(2, 1), (1, 3)], rat_int(1))]),
        TableRow::Y5 => op(&[
            (&[(2, 1), (4, 1)], rat(1, 4)),
            (&[(1, 1), (5, 1)], rat(-3, 5)),
            (&[(3, 2)], rat(1, 9)),
            (&[(1, 3), (3, 1)], rat(1, 9)),
            (&[(1, 2), (2, 2)], rat(1, 8)),
            (&[(1, 6)], rat(1, 360)),
        ]),
        TableRow::Y14 => op(&[
            (&[(2, 1), (4, 1)], rat(-1, 8)),
            (&[(1, 1), (5, 1)], rat(1, 10)),
            (&[(3, 2)], rat(1, 18)),
            (&[(1, 3), (3, 1)], rat(-1, 36)),
            (&[(1, 6)], rat(-1, 360)),
        ]),
        TableRow::Combo => op(&[
            (&[(2, 1), (4, 1)], rat(1, 2)),
            (&[(1, 1), (5, 1)], rat_int(-2)),
            (&[(3, 2)], rat(2, 3)),
            (&[(1, 3), (3, 1)], rat(1, 3)),
            (&[(1, 2), (2, 2)], rat(1, 2)),
        ]),
    }
}

/// Product of partials of `U`, each given as `(index, power)` pairs.
fn u_term(factors: &[&[(usize, u32)]], c: Rational) -> DiffExpr {
    let mut e = DiffExpr::constant(MultiPoly::constant(c));
    for f in factors {
        let mut a = Atom::function();
        for (i, k) in *f {
            a = a.with_time(*i, *k);
        }
        e = e.mul(&DiffExpr::atom(a));
    }
    e
}

fn u_sum(terms: Vec<DiffExpr>) -> DiffExpr {
    terms.iter().fold(DiffExpr::zero(), |acc, t| acc.add(t))
}

/// `log tau` rows as tabulated.
pub fn printed_logtau_row(row: TableRow) -> DiffExpr {
    const D11: &[(usize, u32)] = &[(1, 2)];
    const D12: &[(usize, u32)] = &[(1, 1), (2, 1)];
    const D13: &[(usize, u32)] = &[(1, 1), (3, 1)];
    const D1111: &[(usize, u32)] = &[(1, 4)];
    const D22: &[(usize, u32)] = &[(2, 2)];
    match row {
        TableRow::Y3 => u_sum(vec![
            u_term(&[D1111], rat_int(1)),
            u_term(&[D11, D11], rat_int(6)),
            u_term(&[D22], rat_int(3)),
            u_term(&[D13], rat_int(-4)),
        ]),
        TableRow::Y4 => u_sum(vec![
            u_term(&[&[(1, 1), (4, 1)]], rat_int(-3)),
            u_term(&[&[(2, 1), (3, 1)]], rat_int(2)),
            u_term(&[&[(1, 3), (2, 1)]], rat_int(1)),
            u_term(&[D11, D12], rat_int(6)),
        ]),
        TableRow::Y5 => u_sum(vec![
            u_term(&[&[(1, 1), (5, 1)]], rat(-108, 5)),
            u_term(&[&[(1, 6)]], rat(1, 10)),
            u_term(&[D11, D11, D11], rat_int(6)),
            u_term(&[D1111, D11], rat_int(3)),
            u_term(&[&[(2, 1), (4, 1)]], rat_int(9)),
            u_term(&[&[(3, 2)]], rat_int(4)),
            u_term(&[&[(1, 3), (3, 1)]], rat_int(4)),
            u_term(&[D11, D13], rat_int(24)),
            u_term(&[D11, D22], rat_int(9)),
            u_term(&[&[(1, 2), (2, 2)]], rat(9, 2)),
            u_term(&[D12, D12], rat_int(18)),
        ]),
        TableRow::Y14 => u_sum(vec![
            u_term(&[&[(1, 1), (5, 1)]], rat(-36, 5)),
            u_term(&[&[(1, 6)]], rat(1, 5)),
            u_term(&[D11, D11, D11], rat_int(12)),
            u_term(&[D1111, D11], rat_int(6)),
            u_term(&[&[(2, 1), (4, 1)]], rat_int(9)),
            u_term(&[&[(3, 2)]], rat_int(-4)),
            u_term(&[&[(1, 3), (3, 1)]], rat_int(2)),
            u_term(&[D11, D13], rat_int(12)),
        ]),
        TableRow::Combo => u_sum(vec![
            u_term(&[&[(1, 1), (5, 1)]], rat_int(-4)),
            u_term(&[&[(2, 1), (4, 1)]], rat_int(1)),
            u_term(&[&[(3, 2)]], rat(4, 3)),
            u_term(&[&[(1, 3), (3, 1)]], rat(2, 3)),
            u_term(&[D11, D13], rat_int(4)),
            u_term(&[&[(1, 2), (2, 2)]], rat_int(1)),
            u_term(&[D12, D12], rat_int(4)),
            u_term(&[D11, D22], rat_int(2)),
        ]),
    }
}
