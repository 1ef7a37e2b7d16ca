//! The single contour integrals
//! `Phi_p^+-(u) = sqrt(+-p/2pi) int exp(-+ V(y) +- u y) (y - w)^(+-n) dy`
//! and the wave functions built from them.
//!
//! Derivatives in `u` are taken under the integral: `(+-d/du)` acts as
//! multiplication of the integrand by `y`.

use std::f64::consts::PI;

use num::complex::Complex64;
use thiserror::Error;

use crate::contours::{build_quadrature, standard_contours, ContourError, Envelope, QuadConfig, QuadratureRule, RayContour, Sign};
use crate::potential::{eval_at_times, phase_polynomial, solve_theta, NumericPotential, PotentialError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecialError {
    #[error(transparent)]
    Contour(#[from] ContourError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("contour is for p = {contour}, spec asks for p = {spec}")]
    Mismatch { spec: usize, contour: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhiSpec {
    pub p: usize,
    pub sign: Sign,
    pub n: u32,
    pub w: f64,
    pub contour: RayContour,
    pub quad: QuadConfig,
}

impl PhiSpec {
    /// Canonical contours and default quadrature.
    pub fn standard(p: usize, sign: Sign, n: u32, w: f64) -> Result<Self, SpecialError> {
        Ok(PhiSpec { p, sign, n, w, contour: standard_contours(p, sign)?, quad: QuadConfig::default() })
    }

    /// `sqrt(+-p/2pi)` on the principal branch.
    pub fn prefactor(&self) -> Complex64 {
        Complex64::new(self.sign.as_f64() * self.p as f64 / (2.0 * PI), 0.0).sqrt()
    }

    fn power(&self) -> i32 {
        self.sign.as_f64() as i32 * self.n as i32
    }
}

/// A quadrature-ready `Phi`: rule built once for `|u|` up to a bound.
#[derive(Clone, Debug)]
pub struct Phi {
    spec: PhiSpec,
    potential: NumericPotential,
    rule: QuadratureRule,
    s: f64,
}

/// Smallest distance at which a pole is accepted next to a contour of radius `r`.
pub fn pole_tolerance(r: f64) -> f64 {
    10.0 * f64::EPSILON * r.max(1.0)
}

impl Phi {
    pub fn new(spec: &PhiSpec, potential: NumericPotential, u_bound: f64) -> Result<Self, SpecialError> {
        Self::with_extra_degree(spec, potential, u_bound, spec.p as u32 + 1)
    }

    /// As [`Phi::new`], budgeting for integrand factors up to `y^extra_degree`.
    pub fn with_extra_degree(
        spec: &PhiSpec,
        potential: NumericPotential,
        u_bound: f64,
        extra_degree: u32,
    ) -> Result<Self, SpecialError> {
        if spec.contour.p != spec.p {
            return Err(SpecialError::Mismatch { spec: spec.p, contour: spec.contour.p });
        }
        let env = Envelope {
            theta_abs: potential.theta.iter().map(|x| x.abs()).collect(),
            linear: u_bound,
            power: spec.power(),
            w: spec.w,
            extra_degree,
        };
        let rule = build_quadrature(&spec.contour, &env, &spec.quad)?;
        if spec.power() < 0 {
            spec.contour.check_clear_of(spec.w, pole_tolerance(rule.radius))?;
        }
        Ok(Phi { spec: spec.clone(), potential, rule, s: spec.sign.as_f64() })
    }

    pub fn spec(&self) -> &PhiSpec {
        &self.spec
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    /// `int exp(-+V(y) +- u y + shift) (y-w)^(+-n) factor(y) dy`, without prefactor.
    pub fn integral(&self, u: Complex64, shift: Complex64, factor: impl Fn(Complex64) -> Complex64) -> Complex64 {
        let s = self.s;
        let pw = self.spec.power();
        let w = self.spec.w;
        self.rule.integrate(|y| {
            let e = (-s * self.potential.v(y) + s * u * y + shift).exp();
            let pole = if pw == 0 { Complex64::new(1.0, 0.0) } else { (y - w).powi(pw) };
            e * pole * factor(y)
        })
    }

    pub fn eval(&self, u: Complex64) -> Complex64 {
        self.spec.prefactor() * self.integral(u, Complex64::new(0.0, 0.0), |_| Complex64::new(1.0, 0.0))
    }

    /// `(d/du)^k Phi(u)`, with `(+-d/du)` realized as the factor `y`.
    pub fn derivative(&self, u: Complex64, k: u32) -> Complex64 {
        let s = self.s;
        self.spec.prefactor() * self.integral(u, Complex64::new(0.0, 0.0), |y| (s * y).powu(k))
    }

    /// Residual of `((+-d/du)^p - u) Phi = 0` for `n = 0`, and of
    /// `[(+-d/du - w)((+-d/du)^p - u) - n] Phi = 0` for `n > 0`,
    /// together with the largest term magnitude.
    pub fn ode_residual(&self, u: Complex64) -> (Complex64, f64) {
        let p = self.spec.p as u32;
        let w = self.spec.w;
        let n = self.spec.n as f64;
        let s = self.s;
        let pre = self.spec.prefactor();
        let one = |_: Complex64| Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        if self.spec.n == 0 {
            let a = pre * self.integral(u, zero, |y| y.powu(p));
            let b = pre * u * self.integral(u, zero, one);
            return (a - b, a.norm().max(b.norm()));
        }
        // (D - w)(D^p - u) Phi = int [(y - w)(y^p - u) -+ 1] I
        let terms = [
            pre * self.integral(u, zero, |y| y.powu(p + 1)),
            -pre * u * self.integral(u, zero, |y| y),
            -pre * w * self.integral(u, zero, |y| y.powu(p)),
            pre * (w * u - s - n) * self.integral(u, zero, one),
        ];
        let r = terms.iter().sum();
        (r, terms.iter().map(|t| t.norm()).fold(0.0, f64::max))
    }

    /// The same residual with every `u`-derivative replaced by a central
    /// finite difference of `Phi` itself, step `h`.
    pub fn ode_residual_fd(&self, u: Complex64, h: f64) -> Complex64 {
        let p = self.spec.p as u32;
        let s = self.s;
        let w = self.spec.w;
        let n = self.spec.n as f64;
        let f = |x: Complex64| self.eval(x);
        // (+-d/du)^k via central differences
        let dk = |x: Complex64, k: u32| s.powi(k as i32) * central_derivative(&f, x, k, h);
        let g = |x: Complex64| dk(x, p) - x * f(x);
        if self.spec.n == 0 {
            return g(u);
        }
        let dg = s * central_derivative(&g, u, 1, h);
        dg - w * g(u) - n * f(u)
    }
}

/// Central finite difference of order `k` with second-order accuracy.
pub fn central_derivative(f: &impl Fn(Complex64) -> Complex64, x: Complex64, k: u32, h: f64) -> Complex64 {
    if k == 0 {
        return f(x);
    }
    // Binomial k-th difference on x + (j - k/2) h for even k, x + (2j - k) h for odd k.
    let offsets: Vec<f64> = if k.is_multiple_of(2) {
        (0..=k).map(|j| j as f64 - k as f64 / 2.0).collect()
    } else {
        (0..=k).map(|j| 2.0 * j as f64 - k as f64).collect()
    };
    let mut acc = Complex64::new(0.0, 0.0);
    let mut binom = 1.0;
    for (j, off) in offsets.iter().enumerate() {
        let sign = if (k as usize - j).is_multiple_of(2) { 1.0 } else { -1.0 };
        acc += f(x + off * h) * (sign * binom);
        binom *= (k as usize - j) as f64 / (j as f64 + 1.0);
    }
    let scale = if k.is_multiple_of(2) { h.powi(k as i32) } else { (2.0 * h).powi(k as i32) };
    acc / scale
}

/// Convenience: `Phi(u)` with default quadrature and undeformed potential.
pub fn phi(spec: &PhiSpec, u: Complex64) -> Result<Complex64, SpecialError> {
    Ok(Phi::new(spec, NumericPotential::pure(spec.p), u.norm() + 1.0)?.eval(u))
}

/// Exact-derivative and finite-difference ODE residuals at `u`.
pub fn ode_residual(spec: &PhiSpec, u: Complex64, h: f64) -> Result<OdeResidual, SpecialError> {
    let phi = Phi::new(spec, NumericPotential::pure(spec.p), u.norm() + 2.0 + (spec.p as f64) * h)?;
    let (exact, scale) = phi.ode_residual(u);
    Ok(OdeResidual { exact, fd: phi.ode_residual_fd(u, h), scale })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeResidual {
    pub exact: Complex64,
    pub fd: Complex64,
    /// Largest term in the exact residual.
    pub scale: f64,
}

/// Wave function
/// `Psi(x, t; z) = e^(+-P(t)) sqrt(+-p/2pi) z^((p-1)/2 -+ n) e^(-+ p/(p+1) z^(p+1))
///   int exp(-+V_p(y; t) +- (x + z^p) y) (y - w)^(+-n) dy`.
///
/// The exponential prefactor is folded into the integrand so that large `|z|`
/// does not overflow.
pub fn wave_psi(spec: &PhiSpec, x: f64, times: &[f64], z: Complex64) -> Result<Complex64, SpecialError> {
    let p = spec.p;
    let pot = solve_theta(p)?.numeric(times)?;
    let phase = eval_at_times(&phase_polynomial(p)?, times);
    let u = x + z.powu(p as u32);
    let phi = Phi::new(spec, pot, u.norm() + 1.0)?;
    Ok(psi_from(&phi, phase, z, u, |_| Complex64::new(1.0, 0.0)))
}

/// `Psi` with an extra integrand factor, for applying differential operators in `x`.
pub fn psi_from(phi: &Phi, phase: f64, z: Complex64, u: Complex64, factor: impl Fn(Complex64) -> Complex64) -> Complex64 {
    let spec = phi.spec();
    let p = spec.p as f64;
    let s = spec.sign.as_f64();
    let shift = -s * p / (p + 1.0) * z.powu(spec.p as u32 + 1);
    let zpow = z.powf((p - 1.0) / 2.0 - s * spec.n as f64);
    (s * phase).exp() * spec.prefactor() * zpow * phi.integral(u, Complex64::new(shift.re, shift.im), factor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefactor_branch() {
        let m = PhiSpec::standard(2, Sign::Minus, 0, 0.0).unwrap();
        let c = m.prefactor();
        assert!(c.re.abs() < 1e-16 && (c.im - (1.0 / PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn fd_matches_polynomials() {
        let f = |x: Complex64| x.powu(4);
        let d4 = central_derivative(&f, Complex64::new(0.3, 0.0), 4, 0.1);
        assert!((d4.re - 24.0).abs() < 1e-9);
        let d1 = central_derivative(&f, Complex64::new(1.0, 0.0), 1, 1e-3);
        assert!((d1.re - 4.0).abs() < 1e-5);
    }

    #[test]
    fn pole_on_contour_rejected() {
        let mut spec = PhiSpec::standard(2, Sign::Minus, 1, 0.0).unwrap();
        spec.w = spec.contour.rays[0].apex;
        assert!(matches!(phi(&spec, Complex64::new(0.0, 0.0)), Err(SpecialError::Contour(ContourError::PoleOnContour { .. }))));
    }
}
