//! The kernel
//! `K(lam, lam') = (2 pi i)^-2 int_{Gamma+} du int_{Gamma-} dv
//!     exp(-V(u) + lam' u) / exp(-V(v) + lam v) ((u-w)/(v-w))^n / (u - v)`
//! as a double quadrature sum and in integrable (IIKS) form
//! `K = [sum_{k,l} C_kl A_k(lam') B_l(lam) + n A_pole(lam') B_pole(lam)] / (lam' - lam)`
//! where `C_kl` are the coefficients of `(V'(u) - V'(v))/(u - v)`.

use num::complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::contours::{build_quadrature, standard_contours_with, ContourError, Envelope, QuadConfig, RayContour, Sign, DEFAULT_DELTA};
use crate::potential::{solve_theta, NumericPotential, PotentialError};
use crate::special::pole_tolerance;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error(transparent)]
    Contour(#[from] ContourError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("kernel value {re} has imaginary part {im}; raise the node count")]
    NotReal { re: f64, im: f64 },
    #[error("lam = lam' = {0} needs the diagonal formula")]
    Diagonal(f64),
    #[error("argument {arg} exceeds the bound {bound} the quadrature was built for")]
    OutOfRange { arg: f64, bound: f64 },
}

/// Everything needed to evaluate `K^(p)` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSpec {
    pub p: usize,
    pub n: u32,
    pub w: f64,
    /// `t_1..t_{p-1}`.
    pub times: Vec<f64>,
    pub plus: RayContour,
    pub minus: RayContour,
    pub quad: QuadConfig,
    /// Evaluate `K(-lam, -lam')` with `w -> -w` (the Pearcey sign convention).
    pub reflect: bool,
    /// Preset label used in reports.
    pub label: String,
}

impl KernelSpec {
    pub fn new(p: usize, n: u32, w: f64, times: Vec<f64>) -> Result<Self, KernelError> {
        Self::with_delta(p, n, w, times, DEFAULT_DELTA)
    }

    pub fn with_delta(p: usize, n: u32, w: f64, times: Vec<f64>, delta: f64) -> Result<Self, KernelError> {
        if times.len() + 1 != p {
            return Err(PotentialError::TimeCount { expected: p - 1, got: times.len() }.into());
        }
        Ok(KernelSpec {
            p,
            n,
            w,
            times,
            plus: standard_contours_with(p, Sign::Plus, delta)?,
            minus: standard_contours_with(p, Sign::Minus, delta)?,
            quad: QuadConfig::default(),
            reflect: false,
            label: format!("p{p}"),
        })
    }

    /// Shift both contours along the real axis.
    pub fn with_offset(mut self, offset: f64) -> Self {
        self.plus.origin_offset = offset;
        self.minus.origin_offset = offset;
        self
    }

    pub fn with_nodes(mut self, nodes_per_panel: usize) -> Self {
        self.quad.nodes_per_panel = nodes_per_panel;
        self
    }

    pub fn potential(&self) -> Result<NumericPotential, KernelError> {
        Ok(solve_theta(self.p)?.numeric(&self.times)?)
    }

    /// `w` as seen by the integrals.
    pub fn effective_w(&self) -> f64 {
        if self.reflect {
            -self.w
        } else {
            self.w
        }
    }
}

/// Airy kernel with `n` outliers at `w`: `p = 2`, `t_1 = 0`.
pub fn airy_preset(n: u32, w: f64) -> KernelSpec {
    let mut s = KernelSpec::new(2, n, w, vec![0.0]).expect("p = 2 is supported");
    s.label = "airy".into();
    s
}

/// Pearcey kernel with parameter `tau` and `n` inliers at `w`: `p = 3`,
/// `t = (0, tau/2)`, arguments and `w` reflected.
pub fn pearcey_preset(tau: f64, n: u32, w: f64) -> KernelSpec {
    let mut s = KernelSpec::new(3, n, w, vec![0.0, tau / 2.0]).expect("p = 3 is supported");
    s.reflect = true;
    s.label = "pearcey".into();
    s
}

/// Single-integral vectors at one argument.
#[derive(Clone, Debug, PartialEq)]
pub struct IiksVectors {
    /// `A_k`, `k = 0..=p` (the extra power feeds the diagonal formula).
    pub a: Vec<Complex64>,
    /// `A` with `(u-w)^(n-1)` and with `u (u-w)^(n-1)`.
    pub a_pole: [Complex64; 2],
    /// `B_l`, `l = 0..p`.
    pub b: Vec<Complex64>,
    pub b_pole: Complex64,
}

/// Kernel with both quadrature rules built and the argument-independent parts
/// of the integrands precomputed.
#[derive(Clone, Debug)]
pub struct Kernel {
    spec: KernelSpec,
    /// `C_kl` of `(V'(u) - V'(v))/(u - v)`, `k + l <= p - 1`.
    coeffs: Vec<Vec<f64>>,
    u: Vec<Complex64>,
    /// `weight exp(-V(u)) (u-w)^n / (2 pi i)`.
    ubase: Vec<Complex64>,
    v: Vec<Complex64>,
    /// `weight exp(V(v)) (v-w)^-n / (2 pi i)`.
    vbase: Vec<Complex64>,
    w: f64,
    bound: f64,
}

/// Relative size of the imaginary part tolerated in a kernel value.
pub const REAL_TOL: f64 = 1e-8;

/// Imaginary parts below this are quadrature noise whatever the kernel size.
pub const IM_FLOOR: f64 = 1e-15;

fn two_pi_i() -> Complex64 {
    Complex64::new(0.0, 2.0 * std::f64::consts::PI)
}

impl Kernel {
    /// Build for arguments with `|lam| <= lambda_bound`.
    pub fn new(spec: &KernelSpec, lambda_bound: f64) -> Result<Self, KernelError> {
        let pot = spec.potential()?;
        let p = spec.p;
        let w = spec.effective_w();
        let n = spec.n as i32;
        let theta_abs: Vec<f64> = pot.theta.iter().map(|x| x.abs()).collect();
        let env = |power: i32| Envelope { theta_abs: theta_abs.clone(), linear: lambda_bound, power, w, extra_degree: p as u32 + 1 };
        let rp = build_quadrature(&spec.plus, &env(n), &spec.quad)?;
        let rm = build_quadrature(&spec.minus, &env(-n), &spec.quad)?;
        if n > 0 {
            spec.minus.check_clear_of(w, pole_tolerance(rm.radius))?;
            spec.plus.check_clear_of(w, pole_tolerance(rp.radius))?;
        }
        let ubase = rp
            .nodes
            .iter()
            .zip(&rp.weights)
            .map(|(u, wt)| wt * (-pot.v(*u)).exp() * (u - w).powi(n) / two_pi_i())
            .collect();
        let vbase = rm
            .nodes
            .iter()
            .zip(&rm.weights)
            .map(|(v, wt)| wt * pot.v(*v).exp() * (v - w).powi(-n) / two_pi_i())
            .collect();
        // (u^m - v^m)/(u - v) = sum_{k+l=m-1} u^k v^l, weighted by the coefficient of u^m in V'.
        // V' has no u^(p-1) term.
        let mut vp = pot.theta.clone();
        vp.extend([0.0, 1.0]);
        let mut coeffs = vec![vec![0.0; p]; p];
        for (m, c) in vp.iter().enumerate().skip(1) {
            for k in 0..m {
                coeffs[k][m - 1 - k] += c;
            }
        }
        Ok(Kernel { spec: spec.clone(), coeffs, u: rp.nodes, ubase, v: rm.nodes, vbase, w, bound: lambda_bound })
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn node_count(&self) -> (usize, usize) {
        (self.u.len(), self.v.len())
    }

    fn map(&self, x: f64) -> Result<f64, KernelError> {
        if x.abs() > self.bound + 1e-12 {
            return Err(KernelError::OutOfRange { arg: x, bound: self.bound });
        }
        Ok(if self.spec.reflect { -x } else { x })
    }

    fn real(z: Complex64, scale: f64) -> Result<f64, KernelError> {
        if z.im.abs() > IM_FLOOR && z.im.abs() > REAL_TOL * scale.max(z.re.abs()) {
            return Err(KernelError::NotReal { re: z.re, im: z.im });
        }
        Ok(z.re)
    }

    /// Direct double quadrature sum.
    pub fn double_integral(&self, lam: f64, lam_prime: f64) -> Result<f64, KernelError> {
        let (x, xp) = (self.map(lam)?, self.map(lam_prime)?);
        let eu: Vec<Complex64> = self.u.iter().zip(&self.ubase).map(|(u, b)| b * (xp * u).exp()).collect();
        let (sum, scale) = self
            .v
            .par_iter()
            .zip(&self.vbase)
            .map(|(v, b)| {
                let bv = b * (-x * v).exp();
                let mut s = Complex64::new(0.0, 0.0);
                let mut a = 0.0;
                for (u, au) in self.u.iter().zip(&eu) {
                    let t = au * bv / (u - v);
                    s += t;
                    a += t.norm();
                }
                (s, a)
            })
            .reduce(|| (Complex64::new(0.0, 0.0), 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
        Self::real(sum, scale)
    }

    /// Single integrals at an argument already mapped to the integral frame.
    fn vectors_mapped(&self, x: f64) -> IiksVectors {
        let p = self.spec.p;
        let mut a = vec![Complex64::new(0.0, 0.0); p + 1];
        let mut a_pole = [Complex64::new(0.0, 0.0); 2];
        for (u, b) in self.u.iter().zip(&self.ubase) {
            let e = b * (x * u).exp();
            let mut upow = e;
            for ak in a.iter_mut() {
                *ak += upow;
                upow *= u;
            }
            if self.spec.n > 0 {
                let q = e / (u - self.w);
                a_pole[0] += q;
                a_pole[1] += q * u;
            }
        }
        let mut bvec = vec![Complex64::new(0.0, 0.0); p];
        let mut b_pole = Complex64::new(0.0, 0.0);
        for (v, b) in self.v.iter().zip(&self.vbase) {
            let e = b * (-x * v).exp();
            let mut vpow = e;
            for bl in bvec.iter_mut() {
                *bl += vpow;
                vpow *= v;
            }
            if self.spec.n > 0 {
                b_pole += e / (v - self.w);
            }
        }
        IiksVectors { a, a_pole, b: bvec, b_pole }
    }

    /// `A_k`, `B_l` at a kernel argument.
    pub fn vectors(&self, lam: f64) -> Result<IiksVectors, KernelError> {
        Ok(self.vectors_mapped(self.map(lam)?))
    }

    /// Numerator `N(lam, lam')` from precomputed vectors (`left` at `lam'`, `right` at `lam`);
    /// with `diagonal`, the `lam'`-derivative of the numerator.
    pub fn numerator(&self, left: &IiksVectors, right: &IiksVectors, diagonal: bool) -> (Complex64, f64) {
        let sh = usize::from(diagonal);
        let mut s = Complex64::new(0.0, 0.0);
        let mut a = 0.0;
        for (k, row) in self.coeffs.iter().enumerate() {
            for (l, c) in row.iter().enumerate() {
                if *c != 0.0 {
                    let t = left.a[k + sh] * right.b[l] * *c;
                    s += t;
                    a += t.norm();
                }
            }
        }
        if self.spec.n > 0 {
            let t = left.a_pole[sh] * right.b_pole * self.spec.n as f64;
            s += t;
            a += t.norm();
        }
        (s, a)
    }

    /// Kernel from vectors at two nodes; `lam` and `lam_prime` are the kernel arguments.
    pub fn from_vectors(
        &self,
        lam: f64,
        lam_prime: f64,
        at_lam: &IiksVectors,
        at_lam_prime: &IiksVectors,
    ) -> Result<f64, KernelError> {
        let (x, xp) = (self.map(lam)?, self.map(lam_prime)?);
        if x == xp {
            let (s, a) = self.numerator(at_lam_prime, at_lam, true);
            return Self::real(s, a);
        }
        let (s, a) = self.numerator(at_lam_prime, at_lam, false);
        Self::real(s / (xp - x), a / (xp - x).abs())
    }

    /// Integrable form off the diagonal.
    pub fn iiks(&self, lam: f64, lam_prime: f64) -> Result<f64, KernelError> {
        if lam == lam_prime {
            return Err(KernelError::Diagonal(lam));
        }
        self.from_vectors(lam, lam_prime, &self.vectors(lam)?, &self.vectors(lam_prime)?)
    }

    /// Confluent form `K(lam, lam)`.
    pub fn iiks_diagonal(&self, lam: f64) -> Result<f64, KernelError> {
        let v = self.vectors(lam)?;
        self.from_vectors(lam, lam, &v, &v)
    }

    /// Integrable form, switching to the confluent formula on the diagonal.
    pub fn value(&self, lam: f64, lam_prime: f64) -> Result<f64, KernelError> {
        if lam == lam_prime {
            self.iiks_diagonal(lam)
        } else {
            self.iiks(lam, lam_prime)
        }
    }
}

fn bound(lam: f64, lam_prime: f64) -> f64 {
    lam.abs().max(lam_prime.abs()) + 1.0
}

pub fn kernel_double_integral(spec: &KernelSpec, lam: f64, lam_prime: f64) -> Result<f64, KernelError> {
    Kernel::new(spec, bound(lam, lam_prime))?.double_integral(lam, lam_prime)
}

pub fn kernel_iiks(spec: &KernelSpec, lam: f64, lam_prime: f64) -> Result<f64, KernelError> {
    Kernel::new(spec, bound(lam, lam_prime))?.iiks(lam, lam_prime)
}

pub fn kernel_iiks_diagonal(spec: &KernelSpec, lam: f64) -> Result<f64, KernelError> {
    Kernel::new(spec, bound(lam, lam))?.iiks_diagonal(lam)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Double,
    Iiks,
}

/// Kernel value with a node-doubling error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: f64,
    pub error_estimate: f64,
}

pub fn evaluate(spec: &KernelSpec, lam: f64, lam_prime: f64, rep: Representation) -> Result<KernelValue, KernelError> {
    let run = |s: &KernelSpec| -> Result<f64, KernelError> {
        let k = Kernel::new(s, bound(lam, lam_prime))?;
        match rep {
            Representation::Double => k.double_integral(lam, lam_prime),
            Representation::Iiks => k.value(lam, lam_prime),
        }
    };
    let value = run(spec)?;
    let mut fine = spec.clone();
    fine.quad.nodes_per_panel *= 2;
    let error_estimate = (run(&fine)? - value).abs();
    Ok(KernelValue { value, error_estimate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_table_p3() {
        let k = Kernel::new(&pearcey_preset(1.0, 0, 0.0), 1.0).unwrap();
        // (V'(u) - V'(v))/(u - v) = u^2 + uv + v^2 - 2 t2 with t2 = 1/2
        assert_eq!(k.coeffs, vec![vec![-1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]]);
    }

    #[test]
    fn diagonal_needs_flag() {
        let k = Kernel::new(&airy_preset(0, 0.0), 1.0).unwrap();
        assert_eq!(k.iiks(0.5, 0.5), Err(KernelError::Diagonal(0.5)));
    }
}
