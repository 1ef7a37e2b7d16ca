//! Ray contours `C(omega^l) = R+ omega^l + R+ conj(omega)^l` with
//! `omega = exp(i pi/(p+1))`, and composite Gauss-Legendre rules along them.
//!
//! `Gamma+` is the union of the even wedges and `Gamma-` of the odd ones, so that
//! `exp(-y^(p+1)/(p+1))` decays along every ray of `Gamma+` and
//! `exp(+y^(p+1)/(p+1))` along every ray of `Gamma-`. Wedge `l` has its apex on
//! the real axis at `delta ((p+1)/2 - l)`, which keeps all wedges pairwise
//! disjoint: wedges opening to the same side are nested and the others face
//! away from each other.

use std::f64::consts::PI;

use gauss_quad::legendre::GaussLegendre;
use num::complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContourError {
    #[error("unsupported p = {0} (supported: 2..=6)")]
    UnsupportedP(usize),
    #[error("wedge index {ell} is not admissible for sign {sign} at p = {p}")]
    BadWedge { p: usize, ell: usize, sign: Sign },
    #[error("contour has no rays")]
    Empty,
    #[error("relative tolerance must lie in (0, 1), got {0}")]
    BadTolerance(f64),
    #[error("at least 4 nodes per panel are required, got {0}")]
    TooFewNodes(usize),
    #[error("point {point} lies within {distance:e} of the contour; move the offset")]
    PoleOnContour { point: f64, distance: f64 },
}

/// Which of the two contour families, fixing the sign of the leading exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl std::str::FromStr for Sign {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "+" | "plus" => Ok(Sign::Plus),
            "-" | "minus" => Ok(Sign::Minus),
            _ => Err(format!("sign must be + or -, got {s}")),
        }
    }
}

/// A half line `apex + r e^{i angle}`, `r >= 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray {
    pub angle: f64,
    /// Real apex before the global offset is applied.
    pub apex: f64,
    /// Traversed from the apex to infinity when true.
    pub outward: bool,
}

impl Ray {
    pub fn direction(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }

    /// Euclidean distance from `z` to the ray.
    pub fn distance_to(&self, z: Complex64, offset: f64) -> f64 {
        let a = Complex64::new(self.apex + offset, 0.0);
        let d = self.direction();
        let s = ((z - a) * d.conj()).re.max(0.0);
        (z - a - d * s).norm()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RayContour {
    pub p: usize,
    pub sign: Sign,
    pub rays: Vec<Ray>,
    /// Real shift applied to the whole contour.
    pub origin_offset: f64,
    /// Fixed truncation radius; chosen from the envelope when `None`.
    pub truncation_radius: Option<f64>,
}

/// Default wedge spacing.
pub const DEFAULT_DELTA: f64 = 0.25;

fn check_p(p: usize) -> Result<(), ContourError> {
    if (2..=6).contains(&p) {
        Ok(())
    } else {
        Err(ContourError::UnsupportedP(p))
    }
}

/// All admissible wedge indices for one sign.
pub fn admissible_wedges(p: usize, sign: Sign) -> Vec<usize> {
    let parity = match sign {
        Sign::Plus => 0,
        Sign::Minus => 1,
    };
    (1..=p).filter(|l| l % 2 == parity).collect()
}

/// Two rays of `C(omega^l)`, oriented clockwise about the origin: wedges
/// opening to the right run downward, wedges opening to the left run upward.
/// The imaginary axis (`2l = p + 1`) runs upward. With the principal branch of
/// the prefactor this makes `Psi -> 1` and the p = 2, 3 kernels positive.
fn wedge(p: usize, ell: usize, delta: f64) -> [Ray; 2] {
    let alpha = PI * ell as f64 / (p as f64 + 1.0);
    let apex = delta * ((p as f64 + 1.0) / 2.0 - ell as f64);
    let up = 2 * ell > p;
    [
        Ray { angle: -alpha, apex, outward: !up },
        Ray { angle: alpha, apex, outward: up },
    ]
}

/// Contour built from a chosen subset of admissible wedges.
pub fn wedge_contours(p: usize, sign: Sign, ells: &[usize], delta: f64) -> Result<RayContour, ContourError> {
    check_p(p)?;
    if ells.is_empty() {
        return Err(ContourError::Empty);
    }
    let ok = admissible_wedges(p, sign);
    let mut rays = Vec::new();
    for &ell in ells {
        if !ok.contains(&ell) {
            return Err(ContourError::BadWedge { p, ell, sign });
        }
        rays.extend(wedge(p, ell, delta));
    }
    Ok(RayContour { p, sign, rays, origin_offset: 0.0, truncation_radius: None })
}

/// The canonical `Gamma_p^sign`: every admissible wedge.
///
/// For `p = 2` this is `C(omega^2)` (rays at `+-2pi/3`) for `+` and `C(omega)`
/// (rays at `+-pi/3`) for `-`; for `p = 3`, `Gamma+` is the imaginary axis.
pub fn standard_contours(p: usize, sign: Sign) -> Result<RayContour, ContourError> {
    standard_contours_with(p, sign, DEFAULT_DELTA)
}

pub fn standard_contours_with(p: usize, sign: Sign, delta: f64) -> Result<RayContour, ContourError> {
    check_p(p)?;
    wedge_contours(p, sign, &admissible_wedges(p, sign), delta)
}

impl RayContour {
    pub fn with_offset(mut self, offset: f64) -> Self {
        self.origin_offset = offset;
        self
    }

    pub fn with_radius(mut self, r: Option<f64>) -> Self {
        self.truncation_radius = r;
        self
    }

    /// Distance from a point to the nearest ray.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        self.rays
            .iter()
            .map(|r| r.distance_to(z, self.origin_offset))
            .fold(f64::INFINITY, f64::min)
    }

    /// Error if the real point `w` sits on the contour.
    pub fn check_clear_of(&self, w: f64, tol: f64) -> Result<(), ContourError> {
        let d = self.distance_to(Complex64::new(w, 0.0));
        if d < tol {
            Err(ContourError::PoleOnContour { point: w, distance: d })
        } else {
            Ok(())
        }
    }

    fn max_apex(&self) -> f64 {
        self.rays.iter().map(|r| (r.apex + self.origin_offset).abs()).fold(0.0, f64::max)
    }
}

/// Bound on `log |integrand|` along the rays.
///
/// Integrand: `exp(-+ V(y) +- lambda y) (y - w)^(+-n)` where `V` has leading term
/// `y^(p+1)/(p+1)` and lower coefficients bounded by `theta_abs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Envelope {
    pub theta_abs: Vec<f64>,
    /// Bound on `|lambda|`.
    pub linear: f64,
    /// Power of `|y - w|`, positive or negative.
    pub power: i32,
    pub w: f64,
    /// Extra polynomial factor degree (derivatives realized under the integral).
    pub extra_degree: u32,
}

impl Envelope {
    pub fn plain(linear: f64) -> Self {
        Envelope { theta_abs: Vec::new(), linear, power: 0, w: 0.0, extra_degree: 0 }
    }

    /// `log` bound at distance `r` from an apex at `|c|`.
    fn log_bound(&self, p: usize, r: f64, c: f64) -> f64 {
        let q = p as f64 + 1.0;
        // -Re (c + r e^{ia})^(p+1)/(p+1) <= -r^q/q + sum_{k>=1} binom(q,k) c^k r^(q-k)/q
        let mut lead = -r.powf(q) / q;
        let mut binom = 1.0;
        for k in 1..=p + 1 {
            binom *= (q - k as f64 + 1.0) / k as f64;
            lead += binom * c.powi(k as i32) * r.powi((p + 1 - k) as i32) / q;
        }
        let rr = r + c;
        let lower: f64 = self
            .theta_abs
            .iter()
            .enumerate()
            .map(|(i, th)| th * rr.powi(i as i32 + 1) / (i as f64 + 1.0))
            .sum();
        let pole = if self.power >= 0 {
            self.power as f64 * (rr + self.w.abs()).max(1.0).ln()
        } else {
            0.0
        };
        let extra = self.extra_degree as f64 * rr.max(1.0).ln();
        lead + lower + self.linear * rr + pole + extra
    }

    /// Smallest radius past the envelope peak where the bound drops below
    /// `ln(rel_tol)` relative to that peak.
    pub fn radius(&self, p: usize, c: f64, rel_tol: f64) -> f64 {
        let f = |r: f64| self.log_bound(p, r, c);
        let mut peak = f(0.0);
        let mut r = 0.0;
        let mut hi = 1.0;
        // Walk outward until past the peak and below the threshold.
        loop {
            while r < hi {
                r += hi / 64.0;
                peak = peak.max(f(r));
            }
            if f(hi) < peak + rel_tol.ln() {
                break;
            }
            hi *= 1.5;
        }
        let mut lo = hi / 1.5;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < peak + rel_tol.ln() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi.max(1.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadConfig {
    pub nodes_per_panel: usize,
    pub rel_tol: f64,
    /// Length of the first panel on every ray; later panels double.
    pub first_panel: f64,
    /// Cap on panel length, for integrands with a sharp peak far from the apex.
    pub max_panel: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { nodes_per_panel: 24, rel_tol: 1e-16, first_panel: DEFAULT_DELTA, max_panel: f64::INFINITY }
    }
}

/// Nodes and weights with direction factors folded into the weights.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
    /// `(ray index, r_start, r_end)` per panel.
    pub panels: Vec<(usize, f64, f64)>,
    pub radius: f64,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(y, w)| w * f(*y)).sum()
    }
}

/// Composite Gauss-Legendre rule on every ray, panels doubling in length from
/// the apex out to the truncation radius.
pub fn build_quadrature(c: &RayContour, env: &Envelope, cfg: &QuadConfig) -> Result<QuadratureRule, ContourError> {
    if !(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0) {
        return Err(ContourError::BadTolerance(cfg.rel_tol));
    }
    if cfg.nodes_per_panel < 4 {
        return Err(ContourError::TooFewNodes(cfg.nodes_per_panel));
    }
    if c.rays.is_empty() {
        return Err(ContourError::Empty);
    }
    let radius = c.truncation_radius.unwrap_or_else(|| env.radius(c.p, c.max_apex(), cfg.rel_tol));
    let gl = GaussLegendre::new(cfg.nodes_per_panel).expect("degree checked above");
    let pairs = gl.as_node_weight_pairs();
    let mut rule = QuadratureRule { nodes: Vec::new(), weights: Vec::new(), panels: Vec::new(), radius };
    for (k, ray) in c.rays.iter().enumerate() {
        let apex = Complex64::new(ray.apex + c.origin_offset, 0.0);
        let dir = ray.direction();
        let orient = if ray.outward { dir } else { -dir };
        let mut a = 0.0;
        let mut len = cfg.first_panel.min(cfg.max_panel);
        while a < radius {
            let b = (a + len).min(radius);
            let half = 0.5 * (b - a);
            for (x, wt) in pairs {
                let r = a + half * (x + 1.0);
                rule.nodes.push(apex + dir * r);
                rule.weights.push(orient * (wt * half));
            }
            rule.panels.push((k, a, b));
            a = b;
            len = (2.0 * len).min(cfg.max_panel);
        }
    }
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p2_angles() {
        let plus = standard_contours(2, Sign::Plus).unwrap();
        let mut a: Vec<f64> = plus.rays.iter().map(|r| r.angle).collect();
        a.sort_by(f64::total_cmp);
        assert!((a[0] + 2.0 * PI / 3.0).abs() < 1e-15 && (a[1] - 2.0 * PI / 3.0).abs() < 1e-15);
        let minus = standard_contours(2, Sign::Minus).unwrap();
        assert!(minus.rays.iter().all(|r| (r.angle.abs() - PI / 3.0).abs() < 1e-15));
    }

    #[test]
    fn p3_plus_is_imaginary_axis() {
        let c = standard_contours(3, Sign::Plus).unwrap();
        assert!(c.rays.iter().all(|r| (r.angle.abs() - PI / 2.0).abs() < 1e-15 && r.apex == 0.0));
    }

    #[test]
    fn decay_on_every_ray() {
        for p in 2..=6 {
            for (sign, s) in [(Sign::Plus, 1.0), (Sign::Minus, -1.0)] {
                for ray in standard_contours(p, sign).unwrap().rays {
                    let re = (ray.direction().powu(p as u32 + 1)).re * s;
                    assert!(re > 0.99, "p={p} sign={sign} angle={}", ray.angle);
                }
            }
        }
    }

    #[test]
    fn wedges_disjoint() {
        for p in 2..=6 {
            let plus = standard_contours(p, Sign::Plus).unwrap();
            let minus = standard_contours(p, Sign::Minus).unwrap();
            let rule = build_quadrature(&plus, &Envelope::plain(2.0), &QuadConfig::default()).unwrap();
            let d = rule.nodes.iter().map(|z| minus.distance_to(*z)).fold(f64::INFINITY, f64::min);
            assert!(d > 0.05, "p={p} d={d}");
        }
    }

    #[test]
    fn segment_weights_sum_to_length() {
        let c = standard_contours(3, Sign::Plus).unwrap().with_radius(Some(5.0));
        let rule = build_quadrature(&c, &Envelope::plain(0.0), &QuadConfig::default()).unwrap();
        let s: Complex64 = rule.weights.iter().sum();
        assert!((s - Complex64::new(0.0, 10.0)).norm() < 1e-13);
    }

    #[test]
    fn rejects_bad_requests() {
        let c = standard_contours(2, Sign::Plus).unwrap();
        let cfg = QuadConfig { rel_tol: 1.0, ..Default::default() };
        assert_eq!(build_quadrature(&c, &Envelope::plain(0.0), &cfg), Err(ContourError::BadTolerance(1.0)));
        assert_eq!(standard_contours(7, Sign::Plus), Err(ContourError::UnsupportedP(7)));
        assert!(matches!(wedge_contours(2, Sign::Plus, &[1], 0.25), Err(ContourError::BadWedge { .. })));
    }
}
