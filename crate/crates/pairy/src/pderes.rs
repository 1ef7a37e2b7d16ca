//! Finite-difference residuals of gap-probability PDEs evaluated on computed
//! Fredholm determinants, and the large-`tau` comparison of Pearcey with Airy.
//!
//! The endpoint operators are realized on the two-parameter family
//! `a_i -> e^h a_i + s`: `D` is `d/ds` and `E` is `d/dh` at `h = s = 0`, so
//! `E^e D^d Q` is the mixed `(h, s)` partial of `Q(e^h a + s)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::Mutex;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::t;
use crate::fredholm::{gap_logdet, logdet, Endpoints, FredholmError};
use crate::hirota::{Atom, GapPde};
use crate::kernel::{airy_preset, pearcey_preset, Kernel, KernelError, KernelSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PderesError {
    #[error(transparent)]
    Fredholm(#[from] FredholmError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("the equation differentiates in t{0}, which this kernel does not have")]
    MissingTime(usize),
    #[error("coefficient variable {0} has no value for this kernel")]
    MissingParameter(String),
    #[error("non-finite Q at offsets {0:?}")]
    NonFinite(Offsets),
    #[error("no usable tau values for the asymptotic fit")]
    NoData,
}

/// Step sizes per axis. The time step applies to every `t_i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepSizes {
    pub shift: f64,
    pub dilation: f64,
    pub time: f64,
    pub w: f64,
}

impl Default for StepSizes {
    fn default() -> Self {
        StepSizes { shift: 0.05, dilation: 0.02, time: 0.05, w: 0.05 }
    }
}

impl StepSizes {
    pub fn halved(&self) -> Self {
        StepSizes { shift: self.shift / 2.0, dilation: self.dilation / 2.0, time: self.time / 2.0, w: self.w / 2.0 }
    }
}

/// Integer stencil offsets on every axis.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Offsets {
    pub shift: i32,
    pub dilation: i32,
    /// Offsets of `t_1, t_2, ...`.
    pub times: Vec<i32>,
    pub w: i32,
}

/// Anything that yields `Q` for given endpoints, times and `w`.
pub trait QSource: Sync {
    fn q(&self, e: &[f64], times: &[f64], w: f64) -> Result<f64, PderesError>;
}

impl<F> QSource for F
where
    F: Fn(&[f64], &[f64], f64) -> Result<f64, PderesError> + Sync,
{
    fn q(&self, e: &[f64], times: &[f64], w: f64) -> Result<f64, PderesError> {
        self(e, times, w)
    }
}

/// `log det(I - K chi_E)` for a kernel family with varying times and `w`.
pub struct FredholmSource {
    spec: KernelSpec,
    nodes: usize,
    bound: f64,
    kernels: Mutex<HashMap<Vec<u64>, Kernel>>,
}

impl FredholmSource {
    /// `bound` must cover every endpoint the source will be asked about; one
    /// bound for a whole stencil keeps the contour discretization fixed.
    pub fn new(spec: KernelSpec, nodes: usize, bound: f64) -> Self {
        FredholmSource { spec, nodes, bound, kernels: Mutex::new(HashMap::new()) }
    }

    /// A bound covering `e` under the default stencil moves.
    pub fn bound_for(e: &Endpoints) -> f64 {
        (e.extent() * 1.25).ceil() + 1.0
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    fn kernel(&self, times: &[f64], w: f64) -> Result<Kernel, PderesError> {
        let mut key: Vec<u64> = times.iter().map(|x| x.to_bits()).collect();
        key.push(w.to_bits());
        if let Some(k) = self.kernels.lock().expect("kernel cache").get(&key) {
            return Ok(k.clone());
        }
        let mut spec = self.spec.clone();
        spec.times = times.to_vec();
        spec.w = w;
        let k = Kernel::new(&spec, self.bound)?;
        self.kernels.lock().expect("kernel cache").insert(key, k.clone());
        Ok(k)
    }
}

impl QSource for FredholmSource {
    fn q(&self, e: &[f64], times: &[f64], w: f64) -> Result<f64, PderesError> {
        if e.is_empty() {
            return Ok(0.0);
        }
        let e = Endpoints::new(e.to_vec())?;
        let k = self.kernel(times, w)?;
        Ok(logdet(&k, &e, self.nodes)?)
    }
}

/// Central finite-difference weights for the `k`-th derivative on offsets
/// `-m..=m`, `m = ceil(k/2)`; second order accurate.
pub fn central_weights(k: u32) -> Vec<f64> {
    if k == 0 {
        return vec![1.0];
    }
    let m = k.div_ceil(2) as i32;
    let n = (2 * m + 1) as usize;
    let a = DMatrix::from_fn(n, n, |i, j| f64::from(j as i32 - m).powi(i as i32));
    let mut b = DVector::zeros(n);
    b[k as usize] = (1..=k).map(f64::from).product();
    let x = a.lu().solve(&b).expect("Vandermonde system is regular");
    x.iter().copied().collect()
}

/// Stencil of one derivative order along one axis: `(offset, weight)`.
fn axis_stencil(k: u32) -> Vec<(i32, f64)> {
    let w = central_weights(k);
    let m = (w.len() / 2) as i32;
    w.into_iter().enumerate().map(|(i, c)| (i as i32 - m, c)).filter(|(_, c)| c.abs() > 1e-14).collect()
}

/// Cached values of `Q` on the offset lattice around a base point.
pub struct QGrid<'a, S: QSource> {
    source: &'a S,
    endpoints: Vec<f64>,
    times: Vec<f64>,
    w: f64,
    steps: StepSizes,
    cache: Mutex<BTreeMap<Offsets, f64>>,
}

impl<'a, S: QSource> QGrid<'a, S> {
    pub fn new(source: &'a S, endpoints: &[f64], times: &[f64], w: f64, steps: StepSizes) -> Self {
        QGrid {
            source,
            endpoints: endpoints.to_vec(),
            times: times.to_vec(),
            w,
            steps,
            cache: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn steps(&self) -> StepSizes {
        self.steps
    }

    fn point(&self, o: &Offsets) -> (Vec<f64>, Vec<f64>, f64) {
        let scale = (f64::from(o.dilation) * self.steps.dilation).exp();
        let shift = f64::from(o.shift) * self.steps.shift;
        let e: Vec<f64> = self.endpoints.iter().map(|a| scale * a + shift).collect();
        let mut times = self.times.clone();
        for (i, d) in o.times.iter().enumerate() {
            times[i] += f64::from(*d) * self.steps.time;
        }
        (e, times, self.w + f64::from(o.w) * self.steps.w)
    }

    /// Stencil of an atom: lattice offsets with weights, and the step scale.
    fn stencil(&self, a: &Atom) -> Result<(Vec<(Offsets, f64)>, f64), PderesError> {
        if a.times.len() > self.times.len() {
            return Err(PderesError::MissingTime(a.times.len()));
        }
        let mut terms = vec![(Offsets { times: vec![0; self.times.len()], ..Offsets::default() }, 1.0)];
        let mut scale = 1.0;
        let mut extend = |k: u32, h: f64, set: &dyn Fn(&mut Offsets, i32)| {
            if k == 0 {
                return;
            }
            scale *= h.powi(k as i32);
            let st = axis_stencil(k);
            terms = terms
                .iter()
                .flat_map(|(o, c)| {
                    st.iter().map(move |(d, w)| {
                        let mut o2 = o.clone();
                        set(&mut o2, *d);
                        (o2, c * w)
                    })
                })
                .collect();
        };
        extend(a.shift, self.steps.shift, &|o, d| o.shift = d);
        extend(a.eps, self.steps.dilation, &|o, d| o.dilation = d);
        for (i, k) in a.times.iter().enumerate() {
            extend(*k, self.steps.time, &|o, d| o.times[i] = d);
        }
        extend(a.w, self.steps.w, &|o, d| o.w = d);
        Ok((terms, scale))
    }

    /// Evaluate `Q` at every offset needed by `atoms`, concurrently.
    pub fn prefetch(&self, atoms: &[Atom]) -> Result<(), PderesError> {
        let mut need = BTreeSet::new();
        for a in atoms {
            for (o, _) in self.stencil(a)?.0 {
                need.insert(o);
            }
        }
        let missing: Vec<Offsets> = {
            let cache = self.cache.lock().expect("grid cache");
            need.into_iter().filter(|o| !cache.contains_key(o)).collect()
        };
        let values: Vec<(Offsets, f64)> = missing
            .into_par_iter()
            .map(|o| {
                let (e, times, w) = self.point(&o);
                let q = self.source.q(&e, &times, w)?;
                if !q.is_finite() {
                    return Err(PderesError::NonFinite(o));
                }
                Ok((o, q))
            })
            .collect::<Result<_, PderesError>>()?;
        self.cache.lock().expect("grid cache").extend(values);
        Ok(())
    }

    /// Finite-difference value of the partial described by `a`.
    pub fn fd_partial(&self, a: &Atom) -> Result<f64, PderesError> {
        self.prefetch(std::slice::from_ref(a))?;
        let (terms, scale) = self.stencil(a)?;
        let cache = self.cache.lock().expect("grid cache");
        Ok(terms.iter().map(|(o, c)| c * cache[o]).sum::<f64>() / scale)
    }

    /// The cached lattice as CSV: offsets in parameter units, then `Q`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("shift,dilation");
        for i in 1..=self.times.len() {
            let _ = write!(out, ",{}", t(i));
        }
        out.push_str(",w,Q\n");
        for (o, q) in self.cache.lock().expect("grid cache").iter() {
            let _ = write!(out, "{},{}", f64::from(o.shift) * self.steps.shift, f64::from(o.dilation) * self.steps.dilation);
            for d in &o.times {
                let _ = write!(out, ",{}", f64::from(*d) * self.steps.time);
            }
            let _ = writeln!(out, ",{},{q:.17e}", f64::from(o.w) * self.steps.w);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.cache.lock().expect("grid cache").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermValue {
    pub term: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub id: String,
    pub residual: f64,
    pub max_term: f64,
    /// `|residual| / max_term`, zero when every term vanishes.
    pub relative: f64,
    pub terms: Vec<TermValue>,
    /// Residual with every step halved.
    pub residual_half: f64,
    /// `log2(|residual| / |residual_half|)`.
    pub order: f64,
    pub steps: StepSizes,
    pub nodes: usize,
}

/// Residual of `pde` at one step size on a prepared grid.
fn evaluate<S: QSource>(pde: &GapPde, grid: &QGrid<'_, S>, params: &HashMap<String, f64>) -> Result<(f64, Vec<TermValue>), PderesError> {
    let atoms: Vec<Atom> = pde.expr.terms().flat_map(|(m, _)| m.iter().cloned()).collect();
    grid.prefetch(&atoms)?;
    let mut values: HashMap<Atom, f64> = HashMap::new();
    for a in atoms {
        let v = grid.fd_partial(&a)?;
        values.insert(a, v);
    }
    for v in pde.expr.coefficient_vars() {
        if !params.contains_key(&v) {
            return Err(PderesError::MissingParameter(v));
        }
    }
    let (total, parts) = pde
        .expr
        .evaluate(|a| values[a], params)
        .ok_or_else(|| PderesError::MissingParameter(pde.expr.coefficient_vars().join(",")))?;
    Ok((total, parts.into_iter().map(|(term, value)| TermValue { term, value }).collect()))
}

/// Parameter values of a kernel: `t_i` and `w`.
pub fn kernel_parameters(spec: &KernelSpec) -> HashMap<String, f64> {
    let mut m: HashMap<String, f64> = spec.times.iter().enumerate().map(|(i, v)| (t(i + 1), *v)).collect();
    m.insert("w".into(), spec.w);
    m
}

/// Residual of `pde` for `Q = log det(I - K chi_E)` of `spec`, at `steps` and
/// at half the steps, with `nodes` quadrature nodes per interval.
pub fn residual(pde: &GapPde, spec: &KernelSpec, e: &Endpoints, steps: StepSizes, nodes: usize) -> Result<ResidualReport, PderesError> {
    let source = FredholmSource::new(spec.clone(), nodes, FredholmSource::bound_for(e));
    residual_with(pde, &source, spec, e, steps, nodes).map(|(r, _)| r)
}

/// As [`residual`], also returning the coarse grid as CSV.
pub fn residual_with(
    pde: &GapPde,
    source: &FredholmSource,
    spec: &KernelSpec,
    e: &Endpoints,
    steps: StepSizes,
    nodes: usize,
) -> Result<(ResidualReport, String), PderesError> {
    let params = kernel_parameters(spec);
    let coarse = QGrid::new(source, e.as_slice(), &spec.times, spec.w, steps);
    let (r1, terms) = evaluate(pde, &coarse, &params)?;
    let fine = QGrid::new(source, e.as_slice(), &spec.times, spec.w, steps.halved());
    let (r2, _) = evaluate(pde, &fine, &params)?;
    let max_term = terms.iter().fold(0.0_f64, |m, t| m.max(t.value.abs()));
    let relative = if max_term > 0.0 { r1.abs() / max_term } else { 0.0 };
    let order = if r1 == 0.0 && r2 == 0.0 { f64::INFINITY } else { (r1.abs() / r2.abs()).log2() };
    Ok((
        ResidualReport { id: pde.id.clone(), residual: r1, max_term, relative, terms, residual_half: r2, order, steps, nodes },
        coarse.to_csv(),
    ))
}

/// How the scaled window sits around the Pearcey edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowOrientation {
    /// Window `center + scale * (-E)`.
    Literal,
    /// Window `center + scale * E`, mirror image about the edge.
    Mirrored,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitRow {
    pub tau: f64,
    pub center: f64,
    pub scale: f64,
    /// Gap probability of the rescaled Pearcey window.
    pub pearcey: f64,
    /// Airy gap probability on `-E`.
    pub airy: f64,
    /// `|pearcey / airy - 1|`.
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitReport {
    pub orientation: WindowOrientation,
    pub rows: Vec<LimitRow>,
    /// Slope of `log deviation` against `log tau`.
    pub exponent: f64,
    pub monotone: bool,
    /// `tau` values dropped because the determinant failed.
    pub dropped: Vec<f64>,
}

/// Contour offsets tried for far-out Pearcey windows, where the straight
/// rays through the default apexes lose everything to cancellation.
const PEARCEY_OFFSETS: [f64; 6] = [0.0, 0.5, 1.0, 1.5, -0.5, 2.0];

/// A Pearcey spec whose double-integral and integrable forms agree on
/// `window`, trying the offsets in order.
fn validated_pearcey(tau: f64, window: &Endpoints) -> Option<KernelSpec> {
    let probes: Vec<f64> = {
        let (lo, hi) = (window.as_slice()[0], *window.as_slice().last().expect("nonempty window"));
        vec![lo, 0.5 * (lo + hi), hi]
    };
    PEARCEY_OFFSETS.iter().find_map(|&off| {
        let spec = pearcey_preset(tau, 0, 0.0).with_offset(off);
        let k = Kernel::new(&spec, window.extent() + 1.0).ok()?;
        let agree = probes.iter().all(|&x| {
            let y = x + 0.25;
            match (k.iiks(x, y), k.double_integral(x, y)) {
                (Ok(a), Ok(b)) => a.is_finite() && (a - b).abs() <= 1e-8 * (1.0 + b.abs()),
                _ => false,
            }
        });
        agree.then_some(spec)
    })
}

/// Compare the Pearcey gap probability on a window of size `scale` at
/// `center = (2/27)(3 tau)^(3/2)`, `scale = (3 tau)^(1/6)`, with the Airy gap
/// probability on `-E`.
pub fn pearcey_airy_limit(
    taus: &[f64],
    e: &Endpoints,
    nodes: usize,
    orientation: WindowOrientation,
) -> Result<LimitReport, PderesError> {
    let minus_e = e.negated();
    let airy = gap_logdet(&airy_preset(0, 0.0), &minus_e, nodes)?.det;
    let mut rows = Vec::new();
    let mut dropped = Vec::new();
    for &tau in taus {
        let center = 2.0 / 27.0 * (3.0 * tau).powf(1.5);
        let scale = (3.0 * tau).powf(1.0 / 6.0);
        let sign = match orientation {
            WindowOrientation::Literal => -1.0,
            WindowOrientation::Mirrored => 1.0,
        };
        let mut window: Vec<f64> = e.as_slice().iter().map(|x| center + sign * scale * x).collect();
        window.sort_by(f64::total_cmp);
        let window = Endpoints::new(window)?;
        if e.is_empty() {
            rows.push(LimitRow { tau, center, scale, pearcey: 1.0, airy, deviation: (1.0 / airy - 1.0).abs() });
            continue;
        }
        let Some(spec) = validated_pearcey(tau, &window) else {
            dropped.push(tau);
            continue;
        };
        match gap_logdet(&spec, &window, nodes) {
            Ok(g) => rows.push(LimitRow { tau, center, scale, pearcey: g.det, airy, deviation: (g.det / airy - 1.0).abs() }),
            Err(_) => dropped.push(tau),
        }
    }
    if e.is_empty() {
        return Ok(LimitReport { orientation, rows, exponent: 0.0, monotone: true, dropped });
    }
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.deviation > 0.0).map(|r| (r.tau.ln(), r.deviation.ln())).collect();
    if pts.len() < 2 {
        return Err(PderesError::NoData);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let monotone = rows.windows(2).all(|w| w[1].deviation < w[0].deviation);
    Ok(LimitReport { orientation, rows, exponent: sxy / sxx, monotone, dropped })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_match_textbook_stencils() {
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12);
        assert!(close(&central_weights(1), &[-0.5, 0.0, 0.5]));
        assert!(close(&central_weights(2), &[1.0, -2.0, 1.0]));
        assert!(close(&central_weights(3), &[-0.5, 1.0, 0.0, -1.0, 0.5]));
        assert!(close(&central_weights(4), &[1.0, -4.0, 6.0, -4.0, 1.0]));
    }
}
