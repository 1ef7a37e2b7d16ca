//! Gap probabilities `Q(E) = log det(I - K chi_E)` for the p-Airy family of
//! kernels, together with the exact symbolic machinery that derives the
//! nonlinear PDEs these determinants satisfy and a finite-difference harness
//! that checks them numerically.

pub mod algebra;
pub mod potential;
pub mod contours;
pub mod special;
pub mod kernel;
pub mod fredholm;
pub mod hirota;
pub mod pderes;
