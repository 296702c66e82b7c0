use bfecc::bfecc::{bfecc_step, integrate, Stepping, BLOWUP};
use bfecc::diagnostics::numerical_divergence_h;
use bfecc::grid::{point_shift, Circle};
use bfecc::harness::{run_experiment, ExperimentConfig};
use bfecc::{
    Bfecc, Boundary, Error, FieldSet, FieldState1, FieldState2, Grid2, Rect, Scheme1, Scheme2, SchemeKind,
    SchemeSpec,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn periodic(n: usize) -> Grid2 {
    Grid2::uniform(n, n, Rect::UNIT, Boundary::Periodic).unwrap()
}

fn random2(n: usize, seed: u64) -> FieldState2 {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut v = || (0..n).map(|_| r.gen_range(-1.0..1.0)).collect::<Vec<f64>>();
    FieldState2 { hx: v(), hy: v(), ez: v() }
}

fn max_diff<S: FieldSet>(a: &S, b: &S) -> f64 {
    let mut m: f64 = 0.0;
    for (x, y) in a.parts().into_iter().zip(b.parts()) {
        for k in 0..x.len() {
            m = m.max((x[k] - y[k]).abs());
        }
    }
    m
}

#[test]
fn stepper_matches_the_pure_step() {
    let g = point_shift(&periodic(20), &Circle::new([0.5, 0.5], 0.24));
    let mut op = Scheme2::new(SchemeSpec::new(SchemeKind::LsTheta, 0.0125), &g).unwrap();
    let u0 = random2(g.len(), 1);
    let pure = bfecc_step(&mut op, &u0, 0.0).unwrap();
    let mut stepper = Bfecc::new(op);
    let mut u = u0.clone();
    stepper.step(&mut u, 0.0).unwrap();
    assert_eq!(u, pure);
    // Scratch buffers are reused across steps without leaking state.
    let pure2 = bfecc_step(stepper.operator_mut(), &u, 0.0125).unwrap();
    stepper.step(&mut u, 0.0125).unwrap();
    assert_eq!(u, pure2);
}

#[test]
fn plain_step_is_one_application() {
    let n = 32;
    let h = 1.0 / n as f64;
    let spec = SchemeSpec::new(SchemeKind::Lf, 0.9 * h);
    let mut r = ChaCha8Rng::seed_from_u64(2);
    let u0 = FieldState1 {
        e: (0..n).map(|_| r.gen_range(-1.0..1.0)).collect(),
        h: (0..n).map(|_| r.gen_range(-1.0..1.0)).collect(),
    };
    let expect = bfecc::schemes::step_1d(spec, &u0, h).unwrap();
    let mut stepper = Bfecc::new(Scheme1::new(spec, h, n).unwrap());
    let mut u = u0;
    stepper.plain_step(&mut u, 0.0).unwrap();
    assert_eq!(u, expect);
}

#[test]
fn unstable_runs_are_reported() {
    let n = 64;
    let h = 1.0 / n as f64;
    let mut stepper = Bfecc::new(Scheme1::new(SchemeSpec::new(SchemeKind::Cd, 1.8 * h), h, n).unwrap());
    let mut u = FieldState1 {
        e: (0..n).map(|j| if j % 2 == 0 { 1.0 } else { 0.5 }).collect(),
        h: (0..n).map(|j| ((j * 7) % 5) as f64 * 0.1).collect(),
    };
    match integrate(&mut stepper, &mut u, 0.0, 5000, Stepping::Bfecc, 10) {
        Err(Error::Unstable { sup, .. }) => assert!(sup > BLOWUP),
        other => panic!("expected instability, got {other:?}"),
    }
}

#[test]
fn plain_central_difference_is_first_order_and_bfecc_second() {
    let run = |bfecc: bool| {
        let cfg = ExperimentConfig::parse(&format!(
            "experiment = periodic1d\nratio = 0.1\nsizes = 256,512,1024\nfinal_time = 0.2\nbfecc = {bfecc}\nallow_unstable = true\n"
        ))
        .unwrap();
        run_experiment(&cfg).unwrap().reports
    };
    let lifted = run(true);
    let plain = run(false);
    for r in &lifted[1..] {
        assert!(r.order.unwrap() >= 1.95, "bfecc order {:?}", r.order);
    }
    for r in &plain[1..] {
        assert!(r.order.unwrap() <= 1.05, "plain order {:?}", r.order);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bfecc_step_is_linear(seed in 0u64..10_000, alpha in -2.0f64..2.0, beta in -2.0f64..2.0) {
        let g = point_shift(&periodic(16), &Circle::new([0.5, 0.5], 0.3));
        for kind in [SchemeKind::LsTheta, SchemeKind::LsCd] {
            let mut op = Scheme2::new(SchemeSpec::new(kind, 0.02), &g).unwrap();
            let (u, v) = (random2(g.len(), seed), random2(g.len(), seed ^ 0xabcd));
            let mut w = u.clone();
            w.axpby(alpha, beta, &v);
            let (su, sv, sw) = (
                bfecc_step(&mut op, &u, 0.0).unwrap(),
                bfecc_step(&mut op, &v, 0.0).unwrap(),
                bfecc_step(&mut op, &w, 0.0).unwrap(),
            );
            let mut combo = su;
            combo.axpby(alpha, beta, &sv);
            prop_assert!(max_diff(&combo, &sw) <= 1e-12 * sw.sup_norm().max(1.0));
        }
    }

    #[test]
    fn bfecc_cd_conserves_divergence(seed in 0u64..10_000, n in 6usize..20, ratio in 0.1f64..1.2) {
        let g = periodic(n);
        let u = random2(g.len(), seed);
        let d0 = numerical_divergence_h(&u, &g).unwrap();
        let mut op = Scheme2::new(SchemeSpec::new(SchemeKind::Cd, ratio / n as f64), &g).unwrap();
        let v = bfecc_step(&mut op, &u, 0.0).unwrap();
        let d1 = numerical_divergence_h(&v, &g).unwrap();
        for k in 0..g.len() {
            prop_assert!((d1[k] - d0[k]).abs() <= 1e-13);
        }
    }
}
