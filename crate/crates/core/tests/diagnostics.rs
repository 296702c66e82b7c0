use bfecc::diagnostics::{
    attach_orders, component_rms, convergence_orders, l2_error, l2_error_with, numerical_divergence_h, restrict,
    write_error_csv, ErrorReport, NormConvention,
};
use bfecc::{Boundary, Error, FieldSet, FieldState2, Grid2, Rect};
use proptest::prelude::*;

fn state(v: Vec<f64>) -> FieldState2 {
    let n = v.len() / 3;
    FieldState2 { hx: v[..n].to_vec(), hy: v[n..2 * n].to_vec(), ez: v[2 * n..].to_vec() }
}

fn zero(n: usize) -> FieldState2 {
    FieldState2::zeros(n)
}

#[test]
fn conventions_on_a_known_difference() {
    let a = FieldState2 { hx: vec![1.0, 1.0], hy: vec![0.0, 0.0], ez: vec![2.0, 0.0] };
    let z = zero(2);
    // Component sums of squares: 2, 0, 4.
    assert!((l2_error_with(&a, &z, NormConvention::Unnormalized).unwrap() - 6f64.sqrt()).abs() < 1e-15);
    assert!((l2_error_with(&a, &z, NormConvention::Rms).unwrap() - 1.0).abs() < 1e-15);
    let cs = 1.0 + 0.0 + 2f64.sqrt();
    assert!((l2_error_with(&a, &z, NormConvention::ComponentSum).unwrap() - cs).abs() < 1e-15);
    assert!((l2_error_with(&a, &z, NormConvention::Component(2)).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    assert!(l2_error_with(&a, &z, NormConvention::Component(3)).is_err());
    assert_eq!(component_rms(&a, &z).unwrap(), vec![1.0, 0.0, 2f64.sqrt()]);
}

#[test]
fn norm_names_parse() {
    assert_eq!("rms".parse::<NormConvention>().unwrap(), NormConvention::Rms);
    assert_eq!("component:2".parse::<NormConvention>().unwrap(), NormConvention::Component(2));
    assert!("component:x".parse::<NormConvention>().is_err());
}

#[test]
fn mismatched_shapes_are_rejected() {
    assert!(matches!(l2_error(&zero(3), &zero(4)), Err(Error::LengthMismatch { .. })));
}

#[test]
fn orders_need_positive_errors() {
    assert!(convergence_orders(&[1.0]).is_err());
    assert!(matches!(convergence_orders(&[1.0, 0.0]), Err(Error::NonPositiveError(_))));
}

#[test]
fn csv_layout() {
    let mut reports = vec![
        ErrorReport { label: "cd_a".into(), n: 20, h: 0.05, dt: 0.0125, l2_error: 4e-2, order: None },
        ErrorReport { label: "cd_a".into(), n: 40, h: 0.025, dt: 0.00625, l2_error: 1e-2, order: None },
    ];
    attach_orders(&mut reports);
    let mut buf = Vec::new();
    write_error_csv(&reports, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "grid,n,h,dt,l2_error,order");
    assert_eq!(lines[1], "cd_a,20,5.00000e-2,1.25000e-2,4.00000e-2,");
    assert_eq!(lines[2], "cd_a,40,2.50000e-2,6.25000e-3,1.00000e-2,2.00000e0");
}

#[test]
fn restriction_picks_coincident_points() {
    let fine = Grid2::uniform(8, 8, Rect::UNIT, Boundary::Periodic).unwrap();
    let coarse = Grid2::uniform(4, 4, Rect::UNIT, Boundary::Periodic).unwrap();
    let u = FieldState2::sample(&fine, |p| [p[0], p[1], p[0] * p[1]]);
    let r = restrict(&u, &fine, &coarse).unwrap();
    let want = FieldState2::sample(&coarse, |p| [p[0], p[1], p[0] * p[1]]);
    assert!(l2_error(&r, &want).unwrap() < 1e-15);
}

#[test]
fn divergence_of_a_gradient_free_field() {
    // H = (sin 2πy, sin 2πx) has zero divergence pointwise.
    let g = Grid2::uniform(16, 16, Rect::UNIT, Boundary::Periodic).unwrap();
    let tau = std::f64::consts::TAU;
    let u = FieldState2::sample(&g, |p| [(tau * p[1]).sin(), (tau * p[0]).sin(), 0.0]);
    let d = numerical_divergence_h(&u, &g).unwrap();
    assert!(d.iter().all(|v| v.abs() < 1e-12));
}

fn triple(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    let v = || prop::collection::vec(-10.0f64..10.0, 3 * n);
    (v(), v(), v())
}

proptest! {
    #[test]
    fn l2_is_a_metric((a, b, c) in triple(7), s in -5.0f64..5.0) {
        for norm in [NormConvention::Rms, NormConvention::Unnormalized, NormConvention::ComponentSum] {
            let (a, b, c) = (state(a.clone()), state(b.clone()), state(c.clone()));
            let d = |x: &FieldState2, y: &FieldState2| l2_error_with(x, y, norm).unwrap();
            prop_assert!(d(&a, &a) == 0.0);
            prop_assert!((d(&a, &b) - d(&b, &a)).abs() <= 1e-12 * d(&a, &b).max(1.0));
            prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
            let mut sa = a.clone();
            sa.axpby(s, 0.0, &a);
            let z = zero(7);
            prop_assert!((d(&sa, &z) - s.abs() * d(&a, &z)).abs() <= 1e-12 * (1.0 + d(&a, &z)));
        }
    }

    #[test]
    fn order_estimator_is_exact_on_geometric_sequences(e0 in 1e-6f64..1e3, p in 0.1f64..6.0, len in 2usize..8) {
        let errs: Vec<f64> = (0..len).map(|k| e0 * 2f64.powf(-p * k as f64)).collect();
        for o in convergence_orders(&errs).unwrap() {
            prop_assert!((o - p).abs() < 1e-10);
        }
    }
}
