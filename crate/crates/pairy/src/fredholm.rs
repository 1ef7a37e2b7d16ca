//! Gap probabilities `Q(E) = log det(I - K chi_E)` on finite unions of
//! intervals, by Nystrom discretization with square-root weights.

use gauss_quad::legendre::GaussLegendre;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::kernel::{IiksVectors, Kernel, KernelError, KernelSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FredholmError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("endpoints must be finite, strictly increasing and even in number: {0:?}")]
    BadEndpoints(Vec<f64>),
    #[error("need at least 8 nodes per interval, got {0}")]
    TooFewNodes(usize),
    #[error("det(I - K) = {det:e} is not positive; refine the discretization")]
    NonPositive { det: f64 },
    #[error("semi-infinite gaps need a kernel decaying at +infinity (p = 2, unreflected)")]
    NotDecaying,
}

/// `E = [a_1, a_2] u [a_3, a_4] u ...`; empty when there are no endpoints.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Endpoints(Vec<f64>);

impl Endpoints {
    pub fn new(a: Vec<f64>) -> Result<Self, FredholmError> {
        let ok = a.len().is_multiple_of(2) && a.iter().all(|x| x.is_finite()) && a.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(FredholmError::BadEndpoints(a));
        }
        Ok(Endpoints(a))
    }

    pub fn empty() -> Self {
        Endpoints(Vec::new())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.0.chunks(2).map(|c| (c[0], c[1]))
    }

    /// `-E`.
    pub fn negated(&self) -> Self {
        Endpoints(self.0.iter().rev().map(|x| -x).collect())
    }

    /// Largest `|a_i|`, zero for the empty set.
    pub fn extent(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapResult {
    #[serde(rename = "Q")]
    pub q: f64,
    pub det: f64,
    pub node_count: usize,
    /// `|Q(m) - Q(3m/2)|`.
    pub error_estimate: f64,
}

/// Gauss-Legendre nodes and weights on every interval of `E`.
pub fn nystrom_nodes(e: &Endpoints, m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::with_capacity(m * e.0.len() / 2);
    let mut ws = Vec::with_capacity(xs.capacity());
    if e.is_empty() {
        return (xs, ws);
    }
    let gl = GaussLegendre::new(m).expect("m >= 8 checked by callers");
    for (a, b) in e.intervals() {
        let half = 0.5 * (b - a);
        for (x, w) in gl.as_node_weight_pairs() {
            xs.push(a + half * (x + 1.0));
            ws.push(w * half);
        }
    }
    (xs, ws)
}

/// `log det(I - M)` and `det(I - M)` for one node count.
fn logdet_with(kernel: &Kernel, e: &Endpoints, m: usize) -> Result<(f64, f64, usize), FredholmError> {
    let (xs, ws) = nystrom_nodes(e, m);
    let n = xs.len();
    if n == 0 {
        return Ok((0.0, 1.0, 0));
    }
    let vecs: Vec<IiksVectors> = xs.par_iter().map(|x| kernel.vectors(*x)).collect::<Result<_, _>>()?;
    let sw: Vec<f64> = ws.iter().map(|w| w.sqrt()).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let k = kernel.from_vectors(xs[i], xs[j], &vecs[i], &vecs[j])?;
                    Ok(f64::from(u8::from(i == j)) - sw[i] * k * sw[j])
                })
                .collect::<Result<Vec<f64>, KernelError>>()
        })
        .collect::<Result<_, _>>()?;
    let a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let lu = a.lu();
    let mut sign: f64 = lu.p().determinant();
    let mut q = 0.0;
    for d in lu.u().diagonal().iter() {
        sign *= d.signum();
        q += d.abs().ln();
    }
    let det = sign * q.exp();
    if sign <= 0.0 || !q.is_finite() {
        return Err(FredholmError::NonPositive { det });
    }
    Ok((q, det, n))
}

/// `Q(E)` for a prepared kernel with `m` nodes per interval, without an error
/// estimate.
pub fn logdet(kernel: &Kernel, e: &Endpoints, m: usize) -> Result<f64, FredholmError> {
    if m < 8 {
        return Err(FredholmError::TooFewNodes(m));
    }
    Ok(logdet_with(kernel, e, m)?.0)
}

/// `Q(E)` with `m` Gauss-Legendre nodes per interval, error estimated by a
/// rerun with `3m/2` nodes.
pub fn gap_logdet(spec: &KernelSpec, e: &Endpoints, m: usize) -> Result<GapResult, FredholmError> {
    if m < 8 {
        return Err(FredholmError::TooFewNodes(m));
    }
    if e.is_empty() {
        return Ok(GapResult { q: 0.0, det: 1.0, node_count: 0, error_estimate: 0.0 });
    }
    let kernel = Kernel::new(spec, e.extent() + 1.0)?;
    gap_with_kernel(&kernel, e, m)
}

/// As [`gap_logdet`] with a kernel already built for the range of `E`.
pub fn gap_with_kernel(kernel: &Kernel, e: &Endpoints, m: usize) -> Result<GapResult, FredholmError> {
    if m < 8 {
        return Err(FredholmError::TooFewNodes(m));
    }
    let (q, det, node_count) = logdet_with(kernel, e, m)?;
    let (q2, _, _) = logdet_with(kernel, e, m + m / 2)?;
    Ok(GapResult { q, det, node_count, error_estimate: (q - q2).abs() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SemiInfiniteResult {
    #[serde(flatten)]
    pub gap: GapResult,
    /// Length of the interval actually used.
    pub cut: f64,
    /// `|Q(cut) - Q(cut + 4)|`.
    pub cut_sensitivity: f64,
}

/// Diagonal kernel size below which the tail of `[s, infinity)` is dropped.
pub const TAIL_TOL: f64 = 1e-14;

/// `Q([s, infinity))` for kernels decaying at `+infinity`, evaluated on
/// `[s, s + cut]` with `cut >= m_cut` grown until `K(s+cut, s+cut) < TAIL_TOL`.
pub fn gap_semi_infinite(spec: &KernelSpec, s: f64, m_cut: f64, m: usize) -> Result<SemiInfiniteResult, FredholmError> {
    if spec.p != 2 || spec.reflect {
        return Err(FredholmError::NotDecaying);
    }
    if m_cut.is_nan() || m_cut <= 0.0 || !s.is_finite() {
        return Err(FredholmError::BadEndpoints(vec![s, s + m_cut]));
    }
    let mut cut = m_cut;
    let probe = |x: f64| -> Result<f64, FredholmError> { Ok(Kernel::new(spec, x.abs() + 1.0)?.iiks_diagonal(x)?) };
    while probe(s + cut)?.abs() >= TAIL_TOL {
        cut += 1.0;
        if cut > m_cut + 64.0 {
            return Err(FredholmError::NotDecaying);
        }
    }
    let bound = s.abs().max((s + cut + 4.0).abs()) + 1.0;
    let kernel = Kernel::new(spec, bound)?;
    let gap = gap_with_kernel(&kernel, &Endpoints::new(vec![s, s + cut])?, m)?;
    let longer = logdet_with(&kernel, &Endpoints::new(vec![s, s + cut + 4.0])?, m)?;
    Ok(SemiInfiniteResult { cut_sensitivity: (gap.q - longer.0).abs(), gap, cut })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_validated() {
        assert!(Endpoints::new(vec![1.0, 0.0]).is_err());
        assert!(Endpoints::new(vec![0.0, 1.0, 2.0]).is_err());
        assert!(Endpoints::new(vec![0.0, 1.0, 1.0, 2.0]).is_err());
        assert_eq!(Endpoints::new(vec![-2.0, -1.0, 3.0, 4.0]).unwrap().negated().as_slice(), &[-4.0, -3.0, 1.0, 2.0]);
    }

    #[test]
    fn nodes_integrate_polynomials() {
        let e = Endpoints::new(vec![0.0, 1.0, 2.0, 4.0]).unwrap();
        let (x, w) = nystrom_nodes(&e, 8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| x * x * w).sum();
        assert!((s - (1.0 / 3.0 + 56.0 / 3.0)).abs() < 1e-13);
    }
}
