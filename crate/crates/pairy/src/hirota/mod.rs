//! Hirota bilinear equations of the KP hierarchy and their reduction to PDEs
//! for gap probabilities.
//!
//! The pipeline is: a bilinear operator acting on `tau o tau`, its
//! translation into a PDE for `log tau`, the Virasoro rewrite of `t_1` and
//! `t_{p+1}` partials into endpoint operators, and the subtraction of the
//! same PDE for the topological tau function.

use thiserror::Error;

use crate::potential::PotentialError;

mod bilinear;
mod derive;
mod diffexpr;
mod logtau;
mod tables;
mod targets;
mod virasoro;

pub use bilinear::{
    bilinear_strings, d_name, hirota_apply, hirota_equation, partitions, schur_function, schur_of_symbols,
    HirotaKind, HirotaOperator,
};
pub use derive::{derive_gap_pde, GapEquation, GapPde, SUPPORTED};
pub use diffexpr::{Atom, DiffExpr, Monomial};
pub use logtau::to_logtau_pde;
pub use tables::{printed_logtau_row, printed_operator_row, TableRow};
pub use targets::{target, target_for, targets, Target};
pub use virasoro::{background, virasoro_substitute, GAMMA_CONSTANT};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HirotaError {
    #[error("Hirota equations start at level 3, got {0}")]
    BadLevel(usize),
    #[error("no substitution rule for the partial {atom} at p = {p}")]
    Unsupported { atom: String, p: usize },
    #[error("unsupported equation {equation} at p = {p}, n = {n}; supported: {supported}")]
    UnsupportedEquation { equation: String, p: usize, n: usize, supported: String },
    #[error("additive constants did not cancel: {0}")]
    SurvivingConstant(String),
    #[error("background equation does not vanish on the topological tau function: {0}")]
    Background(String),
    #[error("unknown equation name {0}")]
    UnknownEquation(String),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}
