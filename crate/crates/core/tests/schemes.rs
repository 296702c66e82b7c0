#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;

use bfecc::analysis::{phase_of, symbol};
use bfecc::grid::{point_shift, Circle};
use bfecc::schemes::{step_1d, step_2d, Direction, LsqMode, Media};
use bfecc::{
    Boundary, FieldSet, FieldState1, FieldState2, Grid2, Operator, Pass, Rect, Scheme2, SchemeKind, SchemeSpec,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn periodic(n: usize) -> Grid2 {
    Grid2::uniform(n, n, Rect::UNIT, Boundary::Periodic).unwrap()
}

fn random1(n: usize, seed: u64) -> FieldState1 {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    FieldState1 {
        e: (0..n).map(|_| r.gen_range(-1.0..1.0)).collect(),
        h: (0..n).map(|_| r.gen_range(-1.0..1.0)).collect(),
    }
}

fn random2(n: usize, seed: u64) -> FieldState2 {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut v = || (0..n).map(|_| r.gen_range(-1.0..1.0)).collect::<Vec<f64>>();
    FieldState2 { hx: v(), hy: v(), ez: v() }
}

fn max_diff<S: FieldSet>(a: &S, b: &S) -> f64 {
    a.parts()
        .into_iter()
        .zip(b.parts())
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()).collect::<Vec<_>>())
        .fold(0.0, f64::max)
}

/// Empirical symbol of one pass of a 1D scheme: apply it to `e^{iφj}` in
/// each component and project back onto the mode.
fn empirical_symbol_1d(spec: SchemeSpec, n: usize, m: usize) -> [[Complex64; 2]; 2] {
    let h = 1.0 / n as f64;
    let phi = phase_of(m, n);
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for c in 0..2 {
        let part = |shift: f64| {
            let v: Vec<f64> = (0..n).map(|j| (phi * j as f64 + shift).cos()).collect();
            let z = vec![0.0; n];
            let s = if c == 0 { FieldState1 { e: v, h: z } } else { FieldState1 { e: z, h: v } };
            step_1d(spec, &s, h).unwrap()
        };
        let (re, im) = (part(0.0), part(-PI / 2.0));
        for r in 0..2 {
            let (a, b) = (re.parts()[r].to_vec(), im.parts()[r].to_vec());
            let coef: Complex64 = (0..n)
                .map(|j| Complex64::new(a[j], b[j]) * Complex64::from_polar(1.0, -phi * j as f64))
                .sum::<Complex64>()
                / n as f64;
            out[r][c] = coef;
        }
    }
    out
}

#[test]
fn backward_symbol_is_the_conjugate() {
    let n = 8;
    let h = 1.0 / n as f64;
    for (kind, theta) in [(SchemeKind::Cd, 0.0), (SchemeKind::Lf, 1.0), (SchemeKind::Theta, 0.3)] {
        let fwd = SchemeSpec::new(kind, 0.7 * h).with_theta(theta);
        for m in 0..n {
            let q = empirical_symbol_1d(fwd, n, m);
            let qs = empirical_symbol_1d(fwd.backward(), n, m);
            let closed = symbol(kind, theta, &[phase_of(m, n)], &[0.7], Direction::Forward).unwrap();
            for r in 0..2 {
                for c in 0..2 {
                    assert!((qs[r][c] - q[r][c].conj()).norm() < 1e-14);
                    assert!((q[r][c] - closed.matrix[(r, c)]).norm() < 1e-14);
                }
            }
        }
    }
}

#[test]
fn central_difference_commutes_with_riemann_invariants() {
    // w₁ = (E + H)/2 moves left, w₂ = (E − H)/2 moves right.
    let n = 32;
    let h = 1.0 / n as f64;
    let lambda = 0.6;
    let u = random1(n, 5);
    let got = step_1d(SchemeSpec::new(SchemeKind::Cd, lambda * h), &u, h).unwrap();
    let advect = |w: &[f64], speed: f64| -> Vec<f64> {
        (0..n)
            .map(|j| w[j] + 0.5 * speed * lambda * (w[(j + 1) % n] - w[(j + n - 1) % n]))
            .collect()
    };
    let w1: Vec<f64> = (0..n).map(|j| 0.5 * (u.e[j] + u.h[j])).collect();
    let w2: Vec<f64> = (0..n).map(|j| 0.5 * (u.e[j] - u.h[j])).collect();
    let (a, b) = (advect(&w1, 1.0), advect(&w2, -1.0));
    for j in 0..n {
        assert!((got.e[j] - (a[j] + b[j])).abs() < 1e-13);
        assert!((got.h[j] - (a[j] - b[j])).abs() < 1e-13);
    }
}

#[test]
fn material_coefficients_scale_the_coupling() {
    let g = periodic(12);
    let dt = 0.02;
    let u = random2(g.len(), 8);
    let media = Media { eps: vec![2.0; g.len()], mu: vec![4.0; g.len()] };
    let mut plain = Scheme2::new(SchemeSpec::new(SchemeKind::Cd, dt), &g).unwrap();
    let mut inside = Scheme2::new(SchemeSpec::new(SchemeKind::Cd, dt), &g).unwrap().with_media(&media).unwrap();
    let mut a = FieldState2::zeros(g.len());
    let mut b = FieldState2::zeros(g.len());
    plain.apply(&u, &mut a, Pass::Forward, 0.0).unwrap();
    inside.apply(&u, &mut b, Pass::Forward, 0.0).unwrap();
    for k in 0..g.len() {
        assert!(((b.ez[k] - u.ez[k]) - 0.5 * (a.ez[k] - u.ez[k])).abs() < 1e-14);
        assert!(((b.hx[k] - u.hx[k]) - 0.25 * (a.hx[k] - u.hx[k])).abs() < 1e-14);
        assert!(((b.hy[k] - u.hy[k]) - 0.25 * (a.hy[k] - u.hy[k])).abs() < 1e-14);
    }
    let bad = Media { eps: vec![0.0; g.len()], mu: vec![1.0; g.len()] };
    assert!(Scheme2::new(SchemeSpec::new(SchemeKind::Cd, dt), &g).unwrap().with_media(&bad).is_err());
}

#[test]
fn recompute_mode_matches_cached_weights_on_shifted_grid() {
    let g = point_shift(&periodic(24), &Circle::new([0.5, 0.5], 0.24));
    let spec = SchemeSpec::new(SchemeKind::LsTheta, 0.01);
    let u = random2(g.len(), 9);
    let mut a = Scheme2::new(spec, &g).unwrap();
    let mut b = Scheme2::new(spec, &g).unwrap().with_lsq_mode(LsqMode::Recompute).unwrap();
    let mut oa = FieldState2::zeros(g.len());
    let mut ob = FieldState2::zeros(g.len());
    a.apply(&u, &mut oa, Pass::Final, 0.0).unwrap();
    b.apply(&u, &mut ob, Pass::Final, 0.0).unwrap();
    assert!(max_diff(&oa, &ob) < 1e-11);
    assert!(Scheme2::new(SchemeSpec::new(SchemeKind::Cd, 0.01), &periodic(8))
        .unwrap()
        .with_lsq_mode(LsqMode::Recompute)
        .is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn theta_is_the_blend_of_cd_and_lf(theta in 0.0f64..=1.0, seed in 0u64..1000) {
        let n = 24;
        let h = 1.0 / n as f64;
        let u = random1(n, seed);
        let dt = 0.8 * h;
        let t = step_1d(SchemeSpec::new(SchemeKind::Theta, dt).with_theta(theta), &u, h).unwrap();
        let c = step_1d(SchemeSpec::new(SchemeKind::Cd, dt), &u, h).unwrap();
        let l = step_1d(SchemeSpec::new(SchemeKind::Lf, dt), &u, h).unwrap();
        for j in 0..n {
            prop_assert!((t.e[j] - ((1.0 - theta) * c.e[j] + theta * l.e[j])).abs() <= 1e-15);
            prop_assert!((t.h[j] - ((1.0 - theta) * c.h[j] + theta * l.h[j])).abs() <= 1e-15);
        }

        let g = periodic(8);
        let v = random2(g.len(), seed);
        let spec = |k| SchemeSpec::new(k, 0.5 / 8.0).with_theta(theta);
        let t2 = step_2d(spec(SchemeKind::Theta), &v, &g).unwrap();
        let c2 = step_2d(spec(SchemeKind::Cd), &v, &g).unwrap();
        let l2 = step_2d(spec(SchemeKind::Lf), &v, &g).unwrap();
        for ((a, b), d) in t2.parts().into_iter().zip(c2.parts()).zip(l2.parts()) {
            for k in 0..a.len() {
                prop_assert!((a[k] - ((1.0 - theta) * b[k] + theta * d[k])).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn single_step_is_linear(seed in 0u64..1000, alpha in -2.0f64..2.0, beta in -2.0f64..2.0) {
        let g = point_shift(&periodic(16), &Circle::new([0.5, 0.5], 0.3));
        let (u, v) = (random2(g.len(), seed), random2(g.len(), seed + 1));
        let mut w = u.clone();
        w.axpby(alpha, beta, &v);
        for kind in [SchemeKind::LsCd, SchemeKind::LsTheta] {
            let spec = SchemeSpec::new(kind, 0.02);
            let (su, sv, sw) = (
                step_2d(spec, &u, &g).unwrap(),
                step_2d(spec, &v, &g).unwrap(),
                step_2d(spec, &w, &g).unwrap(),
            );
            let mut combo = su.clone();
            combo.axpby(alpha, beta, &sv);
            let scale = sw.sup_norm().max(1.0);
            prop_assert!(max_diff(&combo, &sw) <= 1e-12 * scale);
        }
    }

    #[test]
    fn constants_are_preserved_on_deformed_grids(r in 0.1f64..0.3, c0 in -2.0f64..2.0) {
        let g = point_shift(&periodic(16), &Circle::new([0.5, 0.5], r));
        let u = FieldState2 { hx: vec![c0; g.len()], hy: vec![-c0; g.len()], ez: vec![2.0 * c0; g.len()] };
        let out = step_2d(SchemeSpec::new(SchemeKind::LsTheta, 0.02), &u, &g).unwrap();
        prop_assert!(max_diff(&out, &u) <= 1e-13 * (1.0 + c0.abs()));
    }
}
