use num::complex::Complex64;
use pairy::contours::{build_quadrature, standard_contours, Envelope, QuadConfig, Sign};
use pairy::fredholm::{gap_logdet, gap_semi_infinite, Endpoints};
use pairy::kernel::{airy_preset, evaluate, pearcey_preset, Kernel, Representation};
use pairy::special::{ode_residual, phi, PhiSpec};
use proptest::prelude::*;
use std::f64::consts::PI;

const AI0: f64 = 0.355_028_053_887_817_2;
const AIP0: f64 = -0.258_819_403_792_806_8;

/// `(Ai(x), Ai'(x))` from the Maclaurin series.
fn airy(x: f64) -> (f64, f64) {
    let (mut f, mut g, mut fp, mut gp) = (0.0, 0.0, 0.0, 0.0);
    let (mut a, mut b) = (1.0, 1.0);
    for k in 0..60 {
        let k3 = 3 * k;
        f += a * x.powi(k3);
        g += b * x.powi(k3 + 1);
        if k > 0 {
            fp += a * k3 as f64 * x.powi(k3 - 1);
        }
        gp += b * (k3 + 1) as f64 * x.powi(k3);
        a /= ((k3 + 2) * (k3 + 3)) as f64;
        b /= ((k3 + 3) * (k3 + 4)) as f64;
    }
    (AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp)
}

fn airy_kernel(x: f64, y: f64) -> f64 {
    let (ax, apx) = airy(x);
    let (ay, apy) = airy(y);
    if x == y {
        apx * apx - x * ax * ax
    } else {
        (ax * apy - apx * ay) / (x - y)
    }
}

#[test]
fn series_oracle_sanity() {
    // Wronskian-free check: Ai'' = x Ai by central differences.
    let h = 1e-3;
    for x in [-2.0, 0.5, 2.0] {
        let d2 = (airy(x + h).0 - 2.0 * airy(x).0 + airy(x - h).0) / (h * h);
        assert!((d2 - x * airy(x).0).abs() < 1e-6);
    }
}

#[test]
fn imaginary_axis_gaussian() {
    let c = standard_contours(3, Sign::Plus).unwrap().with_radius(Some(8.0));
    let rule = build_quadrature(&c, &Envelope::plain(0.0), &QuadConfig::default()).unwrap();
    let v = rule.integrate(|z| (z * z).exp());
    assert!(v.re.abs() < 1e-12 && (v.im.abs() - PI.sqrt()).abs() < 1e-10, "{v}");
}

#[test]
fn phi_is_airy_function_at_p2() {
    let spec = PhiSpec::standard(2, Sign::Minus, 0, 0.0).unwrap();
    for u in [-2.0, -1.0, 0.0, 1.0, 2.5] {
        let v = phi(&spec, Complex64::new(u, 0.0)).unwrap();
        let expected = 2.0 * PI.sqrt() * airy(u).0;
        assert!((v.re - expected).abs() < 1e-10 && v.im.abs() < 1e-10, "u={u}: {v} vs {expected}");
    }
}

#[test]
fn phi_solves_its_ode() {
    for (p, sign, n) in [(3, Sign::Plus, 0), (3, Sign::Minus, 1), (4, Sign::Plus, 1)] {
        let spec = PhiSpec::standard(p, sign, n, 0.5).unwrap();
        let r = ode_residual(&spec, Complex64::new(0.7, 0.2), 1e-2).unwrap();
        assert!(r.exact.norm() < 1e-9 * r.scale.max(1.0), "p={p}: {}", r.exact);
    }
}

#[test]
fn airy_kernel_matches_series() {
    let k = Kernel::new(&airy_preset(0, 0.0), 3.5).unwrap();
    for x in [-2.0, -0.5, 0.0, 1.0, 2.5] {
        for y in [-1.5, 0.0, 0.3, 2.5] {
            let v = k.value(x, y).unwrap();
            assert!((v - airy_kernel(x, y)).abs() < 1e-11, "({x}, {y}): {v}");
        }
    }
}

#[test]
fn representations_agree_with_time_deformation() {
    let mut spec = pearcey_preset(0.6, 0, 0.0);
    spec.times[0] = 0.3;
    for (x, y) in [(-1.0, 0.5), (0.2, 0.2), (1.5, -0.7)] {
        let a = evaluate(&spec, x, y, Representation::Double).unwrap().value;
        let b = evaluate(&spec, x, y, Representation::Iiks).unwrap().value;
        assert!((a - b).abs() < 1e-9 * a.abs().max(1e-3), "({x}, {y}): {a} vs {b}");
    }
}

#[test]
fn small_interval_matches_trace_expansion() {
    // log det(I - K) = -tr K - tr K^2 / 2 - O(K^3) on a short interval.
    let (a, b) = (0.0, 0.2);
    let g = gap_logdet(&airy_preset(0, 0.0), &Endpoints::new(vec![a, b]).unwrap(), 24).unwrap();
    let n = 400;
    let h = (b - a) / n as f64;
    let mid = |i: usize| a + (i as f64 + 0.5) * h;
    let tr1: f64 = (0..n).map(|i| airy_kernel(mid(i), mid(i)) * h).sum();
    let tr2: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| airy_kernel(mid(i), mid(j)).powi(2) * h * h).sum();
    assert!((g.q + tr1 + tr2 / 2.0).abs() < 1e-6, "{} vs {}", g.q, -tr1 - tr2 / 2.0);
}

#[test]
fn tracy_widom_tail() {
    // 1 - F2(s) ~ int_s^inf K(x, x) dx = (2 s^2 Ai^2 - 2 s Ai'^2 - Ai Ai') / 3.
    let s = 2.5;
    let (ai, aip) = airy(s);
    let tail = (2.0 * s * s * ai * ai - 2.0 * s * aip * aip - ai * aip) / 3.0;
    let r = gap_semi_infinite(&airy_preset(0, 0.0), s, 8.0, 40).unwrap();
    assert!((r.gap.q + tail).abs() < tail * tail, "{} vs {}", r.gap.q, -tail);
    assert!(r.cut_sensitivity < 1e-13);
    assert!(gap_semi_infinite(&pearcey_preset(1.0, 0, 0.0), s, 8.0, 40).is_err());
}

#[test]
fn empty_set_has_zero_log_probability() {
    let g = gap_logdet(&pearcey_preset(1.0, 0, 0.0), &Endpoints::empty(), 24).unwrap();
    assert_eq!((g.q, g.det), (0.0, 1.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn gap_probability_decreases_with_the_set(c in -1.5f64..1.5, r in 0.1f64..0.8, grow in 0.05f64..0.5) {
        let spec = airy_preset(0, 0.0);
        let small = gap_logdet(&spec, &Endpoints::new(vec![c - r, c + r]).unwrap(), 24).unwrap();
        let large = gap_logdet(&spec, &Endpoints::new(vec![c - r - grow, c + r]).unwrap(), 24).unwrap();
        prop_assert!(small.q < 0.0);
        prop_assert!(large.q < small.q);
    }

    #[test]
    fn pearcey_gap_is_reflection_symmetric(a in -1.5f64..0.5, len in 0.2f64..1.0) {
        let spec = pearcey_preset(1.0, 0, 0.0);
        let e = Endpoints::new(vec![a, a + len]).unwrap();
        let q = gap_logdet(&spec, &e, 24).unwrap().q;
        let qm = gap_logdet(&spec, &e.negated(), 24).unwrap().q;
        prop_assert!((q - qm).abs() < 1e-10 * q.abs().max(1.0), "{} vs {}", q, qm);
    }
}
