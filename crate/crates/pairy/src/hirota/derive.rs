//! Gap-probability PDEs from Hirota equations.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::algebra::rat;

use super::diffexpr::DiffExpr;
use super::tables::TableRow;
use super::virasoro::{background, virasoro_substitute, GAMMA_CONSTANT};
use super::HirotaError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GapEquation {
    Y3,
    Y4,
    /// `d_2 Y3 - D Y4`.
    Y3Y4Combo,
    /// The `Y5`, `(1,4)` combination free of `d1^6`.
    Y5Y14Combo,
    /// `D^2 Y3` in `U = D^2 Q - ((p-1)/p) t_{p-1}`.
    Boussinesq,
}

/// Inclusive `(low, high)` bounds.
pub type Range = (usize, usize);

/// Supported `(equation, p range, n range)`.
pub const SUPPORTED: &[(GapEquation, Range, Range)] = &[
    (GapEquation::Y3, (2, 5), (0, 1)),
    (GapEquation::Y4, (3, 4), (0, 1)),
    (GapEquation::Y3Y4Combo, (3, 4), (0, 1)),
    (GapEquation::Y5Y14Combo, (4, 4), (0, 1)),
    (GapEquation::Boussinesq, (3, 5), (0, 1)),
];

impl GapEquation {
    pub const ALL: [GapEquation; 5] =
        [GapEquation::Y3, GapEquation::Y4, GapEquation::Y3Y4Combo, GapEquation::Y5Y14Combo, GapEquation::Boussinesq];

    pub fn name(self) -> &'static str {
        match self {
            GapEquation::Y3 => "Y3",
            GapEquation::Y4 => "Y4",
            GapEquation::Y3Y4Combo => "Y3Y4-combo",
            GapEquation::Y5Y14Combo => "Y5-Y14-combo",
            GapEquation::Boussinesq => "Boussinesq",
        }
    }

    pub fn is_supported(self, p: usize, n: usize) -> bool {
        SUPPORTED
            .iter()
            .any(|(e, (p0, p1), (n0, n1))| *e == self && (*p0..=*p1).contains(&p) && (*n0..=*n1).contains(&n))
    }
}

impl fmt::Display for GapEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GapEquation {
    type Err = HirotaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        match key.as_str() {
            "y3" => Ok(GapEquation::Y3),
            "y4" => Ok(GapEquation::Y4),
            "y3y4combo" | "combo" | "d2y3dy4" => Ok(GapEquation::Y3Y4Combo),
            "y5y14combo" | "y5combo" | "y5y14" => Ok(GapEquation::Y5Y14Combo),
            "boussinesq" | "bous" | "d2y3" => Ok(GapEquation::Boussinesq),
            _ => Err(HirotaError::UnknownEquation(s.to_string())),
        }
    }
}

fn supported_text() -> String {
    SUPPORTED
        .iter()
        .map(|(e, (p0, p1), (n0, n1))| format!("{e} (p {p0}..={p1}, n {n0}..={n1})"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// A PDE in the gap probability `Q`, with `expr = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapPde {
    pub id: String,
    pub p: usize,
    pub n: usize,
    #[serde(serialize_with = "serialize_text")]
    pub expr: DiffExpr,
    /// Parameters appearing in coefficients or derivatives.
    pub symbols: Vec<String>,
}

fn serialize_text<S: serde::Serializer>(e: &DiffExpr, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&e.to_text())
}

impl GapPde {
    pub fn new(id: impl Into<String>, p: usize, n: usize, expr: DiffExpr) -> Self {
        let mut symbols = expr.coefficient_vars();
        for (m, _) in expr.terms() {
            for a in m {
                for (i, e) in a.times.iter().enumerate() {
                    if *e > 0 {
                        symbols.push(crate::algebra::t(i + 1));
                    }
                }
                if a.w > 0 {
                    symbols.push("w".into());
                }
            }
        }
        symbols.sort();
        symbols.dedup();
        GapPde { id: id.into(), p, n, expr, symbols }
    }

    /// Canonical text: leading coefficient scaled to 1.
    pub fn canonical_text(&self) -> String {
        self.expr.normalized().to_text()
    }

    /// Equal up to a nonzero constant factor.
    pub fn matches(&self, other: &DiffExpr) -> bool {
        self.expr.ratio_to(other).is_some()
    }
}

impl fmt::Display for GapPde {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = 0", self.canonical_text())
    }
}

/// `Gamma(Q + g0) - Gamma(g0)` for the `log tau` PDE `logtau`.
fn gap_part(logtau: &DiffExpr, p: usize, n: usize) -> Result<DiffExpr, HirotaError> {
    let in_g = virasoro_substitute(logtau, p, n)?;
    let bg = background(p)?;
    let split = in_g.map_atoms(|a| -> Result<DiffExpr, HirotaError> {
        Ok(DiffExpr::atom(a.clone()).add(&DiffExpr::constant(bg(a))))
    })?;
    let rest = split.constant_part();
    let without_c = rest.at_zero(GAMMA_CONSTANT);
    if !without_c.is_zero() {
        return Err(HirotaError::Background(without_c.to_text()));
    }
    let q = split.without_constant();
    if q.coefficient_vars().iter().any(|v| v == GAMMA_CONSTANT) {
        return Err(HirotaError::SurvivingConstant(q.to_text()));
    }
    Ok(q)
}

fn row_pde(row: TableRow, p: usize, n: usize) -> Result<DiffExpr, HirotaError> {
    gap_part(&row.logtau()?, p, n)
}

/// Derive the PDE for `Q` from the given Hirota equation.
pub fn derive_gap_pde(equation: GapEquation, p: usize, n: usize) -> Result<GapPde, HirotaError> {
    if !equation.is_supported(p, n) {
        return Err(HirotaError::UnsupportedEquation {
            equation: equation.to_string(),
            p,
            n,
            supported: supported_text(),
        });
    }
    let expr = match equation {
        GapEquation::Y3 => row_pde(TableRow::Y3, p, n)?,
        GapEquation::Y4 => row_pde(TableRow::Y4, p, n)?,
        GapEquation::Y3Y4Combo => {
            let y3 = row_pde(TableRow::Y3, p, n)?;
            let y4 = row_pde(TableRow::Y4, p, n)?;
            y3.time(2).sub(&y4.shift()).scale(&rat(1, 3))
        }
        GapEquation::Y5Y14Combo => row_pde(TableRow::Combo, p, n)?,
        GapEquation::Boussinesq => row_pde(TableRow::Y3, p, n)?.shift().shift(),
    };
    Ok(GapPde::new(format!("{equation}:p={p}:n={n}"), p, n, expr))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn airy_y3() {
        let pde = derive_gap_pde(GapEquation::Y3, 2, 0).unwrap();
        assert_eq!(pde.canonical_text(), "D^4.Q + 6*(D^2.Q)^2 - 4*E.D.Q + 2*D.Q");
    }

    #[test]
    fn pearcey_y3() {
        let pde = derive_gap_pde(GapEquation::Y3, 3, 0).unwrap();
        assert_eq!(pde.canonical_text(), "D^4.Q + 6*(D^2.Q)^2 - 8*t2*D^2.Q + 3*d2^2.Q");
    }

    #[test]
    fn unsupported_reported() {
        assert!(matches!(
            derive_gap_pde(GapEquation::Y4, 2, 0),
            Err(HirotaError::UnsupportedEquation { .. })
        ));
    }
}
