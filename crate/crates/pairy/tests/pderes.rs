use approx::assert_relative_eq;
use pairy::fredholm::Endpoints;
use pairy::hirota::{derive_gap_pde, target, Atom, DiffExpr, GapEquation, GapPde};
use pairy::kernel::{airy_preset, pearcey_preset};
use pairy::pderes::{
    central_weights, pearcey_airy_limit, residual, PderesError, QGrid, StepSizes, WindowOrientation,
};
use proptest::prelude::*;

type Source = fn(&[f64], &[f64], f64) -> Result<f64, PderesError>;

fn quartic(e: &[f64], _: &[f64], _: f64) -> Result<f64, PderesError> {
    Ok(e[0].powi(4))
}

fn product(e: &[f64], _: &[f64], _: f64) -> Result<f64, PderesError> {
    Ok(e[0] * e[1])
}

fn exponential(e: &[f64], _: &[f64], _: f64) -> Result<f64, PderesError> {
    Ok((e[0] + e[1]).exp())
}

fn mixed(e: &[f64], t: &[f64], w: f64) -> Result<f64, PderesError> {
    Ok(e[0] * t[1].powi(2) * w.powi(2))
}

fn grid<'a>(f: &'a Source, e: &[f64]) -> QGrid<'a, Source> {
    QGrid::new(f, e, &[0.0, 1.0], 1.0, StepSizes::default())
}

#[test]
fn fourth_shift_derivative_of_quartic_is_exact() {
    let f: Source = quartic;
    let g = grid(&f, &[0.0, 1.0]);
    let d4 = g.fd_partial(&Atom::function().with_shift(4)).unwrap();
    assert_relative_eq!(d4, 24.0, epsilon = 1e-6);
}

#[test]
fn dilation_follows_euler_relation() {
    let f: Source = product;
    let (a1, a2) = (0.7, 1.3);
    let g = grid(&f, &[a1, a2]);
    let eps = g.fd_partial(&Atom::function().with_eps(1)).unwrap();
    // Q(e^h a) = e^{2h} a1 a2; the central difference error is (2h)^2/6 relative.
    assert_relative_eq!(eps, 2.0 * a1 * a2, max_relative = 1e-3);
}

#[test]
fn shift_derivative_of_exponential() {
    let f: Source = exponential;
    let g = grid(&f, &[0.2, 0.5]);
    let d = g.fd_partial(&Atom::function().with_shift(1)).unwrap();
    // Relative error (2h)^2/6 for the rate 2.
    assert_relative_eq!(d, 2.0 * 0.7_f64.exp(), max_relative = 2e-3);
}

#[test]
fn time_and_w_partials() {
    let f: Source = mixed;
    let g = grid(&f, &[0.5, 1.0]);
    let a = Atom::from_times(&[0, 2]).with_w(2).with_shift(1);
    assert_relative_eq!(g.fd_partial(&a).unwrap(), 4.0, epsilon = 1e-8);
    let missing = Atom::from_times(&[0, 0, 1]);
    assert!(matches!(g.fd_partial(&missing), Err(PderesError::MissingTime(3))));
}

#[test]
fn grid_csv_has_header_and_rows() {
    let f: Source = quartic;
    let g = grid(&f, &[0.0, 1.0]);
    g.fd_partial(&Atom::function().with_shift(2)).unwrap();
    let csv = g.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("shift,dilation,t1,t2,w,Q"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn empty_set_gives_zero_residual() {
    let pde = derive_gap_pde(GapEquation::Y3, 2, 0).unwrap();
    let r = residual(&pde, &airy_preset(0, 0.0), &Endpoints::empty(), StepSizes::default(), 40).unwrap();
    assert_eq!(r.residual, 0.0);
    assert_eq!(r.relative, 0.0);
}

#[test]
fn airy_residual_is_small_and_second_order() {
    let pde = GapPde::new("airy-y3", 2, 0, target("airy-y3").unwrap().expr);
    let e = Endpoints::new(vec![-1.0, 1.0]).unwrap();
    let r = residual(&pde, &airy_preset(0, 0.0), &e, StepSizes::default(), 40).unwrap();
    assert!(r.relative < 1e-2, "{r:?}");
    assert!(r.order >= 1.5, "{r:?}");
    // The two largest terms balance each other.
    let mut v: Vec<f64> = r.terms.iter().map(|t| t.value).collect();
    v.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    assert!(v[0] * v[1] < 0.0 && v[1].abs() > 0.1 * v[0].abs(), "{v:?}");
}

#[test]
fn pearcey_y4_residual_on_asymmetric_set() {
    let pde = GapPde::new("pearcey-y4", 3, 0, target("pearcey-y4").unwrap().expr);
    let e = Endpoints::new(vec![-1.0, 0.5]).unwrap();
    let r = residual(&pde, &pearcey_preset(1.0, 0, 0.0), &e, StepSizes::default(), 40).unwrap();
    assert!(r.relative < 1e-2 && r.order >= 1.5, "{r:?}");
}

/// Drop every term with a `w` derivative.
fn without_w(e: &DiffExpr) -> DiffExpr {
    e.map_atoms(|a| -> Result<DiffExpr, ()> { Ok(if a.w > 0 { DiffExpr::zero() } else { DiffExpr::atom(a.clone()) }) })
        .unwrap()
}

#[test]
fn inlier_equation_without_w_terms_reduces_to_n0() {
    let e = Endpoints::new(vec![-1.0, 0.5]).unwrap();
    let spec = pearcey_preset(1.0, 0, 0.0);
    let inl = GapPde::new("inl", 3, 0, without_w(&target("pearcey-inliers-y3").unwrap().expr));
    let plain = GapPde::new("plain", 3, 0, target("pearcey-y3").unwrap().expr);
    let a = residual(&inl, &spec, &e, StepSizes::default(), 40).unwrap();
    let b = residual(&plain, &spec, &e, StepSizes::default(), 40).unwrap();
    assert_relative_eq!(a.residual, b.residual, max_relative = 1e-9);
}

#[test]
fn limit_of_empty_set_is_exact() {
    let r = pearcey_airy_limit(&[4.0], &Endpoints::empty(), 40, WindowOrientation::Mirrored).unwrap();
    assert_eq!(r.rows[0].pearcey, 1.0);
    assert_eq!(r.rows[0].airy, 1.0);
    assert_eq!(r.rows[0].deviation, 0.0);
}

proptest! {
    #[test]
    fn central_weights_reproduce_monomials(k in 1u32..7, j in 0u32..8) {
        let w = central_weights(k);
        let m = (w.len() / 2) as i32;
        let moment: f64 = w.iter().enumerate().map(|(i, c)| c * f64::from(i as i32 - m).powi(j as i32)).sum();
        let factorial: f64 = (1..=k).map(f64::from).product();
        // Exact for degrees up to the stencil size; symmetric stencils gain one more.
        if j <= 2 * m as u32 {
            let expected = if j == k { factorial } else { 0.0 };
            prop_assert!((moment - expected).abs() < 1e-8 * factorial);
        }
    }

    #[test]
    fn shift_stencil_exact_on_cubic_polynomials(c in proptest::collection::vec(-2.0f64..2.0, 4), x0 in -1.0f64..1.0) {
        let top = c[3];
        let poly = move |e: &[f64], _: &[f64], _: f64| -> Result<f64, PderesError> {
            let x = e[0];
            Ok(c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x)
        };
        let g = QGrid::new(&poly, &[x0, x0 + 1.0], &[], 0.0, StepSizes::default());
        let d3 = g.fd_partial(&Atom::function().with_shift(3)).unwrap();
        prop_assert!((d3 - 6.0 * top).abs() < 1e-6);
    }
}
