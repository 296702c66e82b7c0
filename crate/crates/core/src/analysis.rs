//! Fourier symbols of the uniform-grid schemes and what follows from them:
//! BFECC symbols, spectral radii, CFL bounds, accuracy orders and the
//! numerical phase speed.
//!
//! A mode `e^{i(k x + l y)}` is described by its phases `k̃Δx`, `l̃Δy`; the
//! symbol also needs the mesh ratios `λ = Δt/Δx`. 1D symbols are 2×2 in
//! `(E, H)`, 2D symbols are 3×3 in `(Hx, Hy, Ez)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec;
use crate::lsq::log_log_slope;
use crate::schemes::{Direction, SchemeKind};

pub type CMatrix = DMatrix<Complex64>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct SymbolMatrix {
    pub matrix: CMatrix,
    pub phases: Vec<f64>,
    pub ratios: Vec<f64>,
}

/// Phase `2πk/n` of dual index `k` on an `n`-point periodic axis.
pub fn phase_of(k: usize, n: usize) -> f64 {
    2.0 * PI * k as f64 / n as f64
}

/// `d/dx` coupling matrix for 1D `(E, H)`.
fn a1d() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0].map(Complex64::from))
}

/// `d/dx` and `d/dy` coupling matrices for `(Hx, Hy, Ez)`.
fn a2d() -> (CMatrix, CMatrix) {
    let ax = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0];
    let ay = [0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0];
    (
        CMatrix::from_row_slice(3, 3, &ax.map(Complex64::from)),
        CMatrix::from_row_slice(3, 3, &ay.map(Complex64::from)),
    )
}

fn blend(kind: SchemeKind, theta: f64) -> Result<f64> {
    match kind {
        SchemeKind::Cd => Ok(0.0),
        SchemeKind::Lf => Ok(1.0),
        SchemeKind::Theta => {
            if (0.0..=1.0).contains(&theta) {
                Ok(theta)
            } else {
                Err(Error::InvalidParameter(format!("theta must lie in [0, 1], got {theta}")))
            }
        }
        SchemeKind::LsCd | SchemeKind::LsTheta => Err(Error::SchemeGridMismatch {
            scheme: kind.to_string(),
            reason: "no circulant symbol on a non-uniform grid".into(),
        }),
    }
}

fn check_dims(phases: &[f64], ratios: &[f64]) -> Result<()> {
    if phases.len() != ratios.len() || !(1..=2).contains(&phases.len()) {
        return Err(Error::InvalidParameter(format!(
            "symbols need 1 or 2 dimensions, got {} phases and {} ratios",
            phases.len(),
            ratios.len()
        )));
    }
    Ok(())
}

/// Closed-form symbol `q I + i Σ λ_d sin(φ_d) A_d` with
/// `q = 1 − θ + θ·mean(cos φ_d)`; backward symbols are conjugated.
pub fn symbol(
    kind: SchemeKind,
    theta: f64,
    phases: &[f64],
    ratios: &[f64],
    direction: Direction,
) -> Result<SymbolMatrix> {
    check_dims(phases, ratios)?;
    let th = blend(kind, theta)?;
    let d = phases.len();
    let mean_cos = phases.iter().map(|p| p.cos()).sum::<f64>() / d as f64;
    let q = 1.0 - th + th * mean_cos;
    let mut m = if d == 1 {
        CMatrix::identity(2, 2) * Complex64::from(q) + a1d() * (I * ratios[0] * phases[0].sin())
    } else {
        let (ax, ay) = a2d();
        CMatrix::identity(3, 3) * Complex64::from(q)
            + ax * (I * ratios[0] * phases[0].sin())
            + ay * (I * ratios[1] * phases[1].sin())
    };
    if direction == Direction::Backward {
        m = m.map(|z| z.conj());
    }
    Ok(SymbolMatrix { matrix: m, phases: phases.to_vec(), ratios: ratios.to_vec() })
}

/// `e^{ΔtP}` for the mode: `I + i sin(ω) B/ω + (cos ω − 1) B²/ω²` where
/// `iB` is the generator scaled by `Δt`.
pub fn exact_propagator(phases: &[f64], ratios: &[f64]) -> Result<CMatrix> {
    check_dims(phases, ratios)?;
    let b = if phases.len() == 1 {
        a1d() * Complex64::from(ratios[0] * phases[0])
    } else {
        let (ax, ay) = a2d();
        ax * Complex64::from(ratios[0] * phases[0]) + ay * Complex64::from(ratios[1] * phases[1])
    };
    let n = b.nrows();
    let w = phases
        .iter()
        .zip(ratios)
        .map(|(p, r)| (p * r).powi(2))
        .sum::<f64>()
        .sqrt();
    if w == 0.0 {
        return Ok(CMatrix::identity(n, n));
    }
    let b2 = &b * &b;
    Ok(CMatrix::identity(n, n) + b * (I * (w.sin() / w)) + b2 * Complex64::from((w.cos() - 1.0) / (w * w)))
}

/// `Q_B = Q (I + ½(I − Q* Q))`.
pub fn bfecc_symbol(q: &CMatrix, qstar: &CMatrix) -> Result<CMatrix> {
    if q.shape() != qstar.shape() || q.nrows() != q.ncols() {
        return Err(Error::InvalidParameter(format!(
            "symbol shapes {:?} and {:?} do not match",
            q.shape(),
            qstar.shape()
        )));
    }
    let id = CMatrix::identity(q.nrows(), q.ncols());
    let inner = &id + (&id - qstar * q) * Complex64::from(0.5);
    Ok(q * inner)
}

/// Forward and BFECC symbols of one scheme at one mode.
pub fn scheme_bfecc_symbol(kind: SchemeKind, theta: f64, phases: &[f64], ratios: &[f64]) -> Result<CMatrix> {
    let q = symbol(kind, theta, phases, ratios, Direction::Forward)?;
    let qs = symbol(kind, theta, phases, ratios, Direction::Backward)?;
    bfecc_symbol(&q.matrix, &qs.matrix)
}

pub fn eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    m.clone()
        .schur()
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .unwrap_or_default()
}

pub fn spectral_radius(m: &CMatrix) -> f64 {
    eigenvalues(m).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct ScanResult {
    pub max_radius: f64,
    /// Dual indices of the maximizing mode.
    pub argmax: Vec<usize>,
    /// `(indices, radius)` for every sampled mode.
    pub radii: Vec<(Vec<usize>, f64)>,
}

/// Largest BFECC spectral radius over the dual indices `0..samples` per axis.
pub fn stability_scan(kind: SchemeKind, theta: f64, ratios: &[f64], samples: usize) -> Result<ScanResult> {
    if samples < 64 {
        return Err(Error::InvalidParameter(format!("need at least 64 samples per axis, got {samples}")));
    }
    let dims = ratios.len();
    check_dims(&vec![0.0; dims], ratios)?;
    blend(kind, theta)?;
    let total = samples.pow(dims as u32);
    let radii = exec::map_range(total, |m| {
        let idx: Vec<usize> = if dims == 1 { vec![m] } else { vec![m / samples, m % samples] };
        let phases: Vec<f64> = idx.iter().map(|&k| phase_of(k, samples)).collect();
        let qb = scheme_bfecc_symbol(kind, theta, &phases, ratios).expect("validated above");
        (idx, spectral_radius(&qb))
    });
    let (argmax, max_radius) = radii
        .iter()
        .fold((vec![0; dims], f64::NEG_INFINITY), |acc, (i, r)| {
            if *r > acc.1 || r.is_nan() {
                (i.clone(), if r.is_nan() { f64::INFINITY } else { *r })
            } else {
                acc
            }
        });
    Ok(ScanResult { max_radius, argmax, radii })
}

/// Radius above which a scanned symbol counts as unstable.
pub const STABLE_TOL: f64 = 1e-12;

/// Largest stable `Δt` for the given spacings.
///
/// `cd` and `lf` use the closed-form bounds; `theta` bisects on the
/// stability scan to relative tolerance `1e-6`.
pub fn cfl_bound(kind: SchemeKind, theta: f64, spacings: &[f64]) -> Result<f64> {
    if spacings.is_empty() || spacings.len() > 3 || spacings.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::InvalidParameter(format!("bad spacings {spacings:?}")));
    }
    let inv = spacings.iter().map(|h| h.powi(-2)).sum::<f64>().sqrt();
    let hmin = spacings.iter().copied().fold(f64::INFINITY, f64::min);
    match (kind, spacings.len()) {
        (SchemeKind::Cd, _) => Ok(3f64.sqrt() / inv),
        (SchemeKind::Lf, 1) => Ok(2.0 * spacings[0]),
        (SchemeKind::Lf, 2) => Ok((2.0 / inv).min((3.5f64).sqrt() * hmin)),
        (SchemeKind::Lf, _) => Ok((2.0 / inv).min(3f64.sqrt() * hmin)),
        (SchemeKind::Theta, 1 | 2) => theta_bound(theta, spacings),
        (SchemeKind::Theta, _) => Err(Error::InvalidParameter(
            "theta bound is only computed in one and two dimensions".into(),
        )),
        (k, _) => Err(Error::SchemeGridMismatch {
            scheme: k.to_string(),
            reason: "no proven bound for least-squares schemes".into(),
        }),
    }
}

fn theta_bound(theta: f64, spacings: &[f64]) -> Result<f64> {
    let samples = if spacings.len() == 1 { 4096 } else { 128 };
    let stable = |dt: f64| -> Result<bool> {
        let ratios: Vec<f64> = spacings.iter().map(|h| dt / h).collect();
        Ok(stability_scan(SchemeKind::Theta, theta, &ratios, samples)?.max_radius <= 1.0 + STABLE_TOL)
    };
    let mut lo = 0.0;
    let mut hi = spacings.iter().copied().fold(f64::INFINITY, f64::min);
    while stable(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Ok(f64::INFINITY);
        }
    }
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if stable(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Clone, Debug)]
pub struct OrderFit {
    pub order: f64,
    pub hs: Vec<f64>,
    pub errors: Vec<f64>,
}

/// Exponent `p` in `‖Q(h) − e^{ΔtP}‖ ≈ C hᵖ` for the lowest mode on
/// `N = 16..256` grids at fixed mesh ratio.
pub fn accuracy_order(kind: SchemeKind, theta: f64, with_bfecc: bool, dims: usize, ratio: f64) -> Result<OrderFit> {
    let ratios = vec![ratio; dims];
    let mut hs = Vec::new();
    let mut errors = Vec::new();
    for n in [16usize, 32, 64, 128, 256] {
        let phases = vec![phase_of(1, n); dims];
        let q = if with_bfecc {
            scheme_bfecc_symbol(kind, theta, &phases, &ratios)?
        } else {
            symbol(kind, theta, &phases, &ratios, Direction::Forward)?.matrix
        };
        let e = exact_propagator(&phases, &ratios)?;
        hs.push(1.0 / n as f64);
        errors.push((q - e).norm());
    }
    Ok(OrderFit { order: log_log_slope(&hs, &errors), hs, errors })
}

/// Normalized phase speed of 1D BFECC-cd,
/// `arcsin[λ(1 − ½λ² sin² k̃h) sin k̃h] / (λ k̃h)`.
pub fn phase_speed(lambda: f64, kh: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    if kh == 0.0 {
        return Ok(1.0);
    }
    let s = kh.sin();
    let arg = lambda * (1.0 - 0.5 * lambda * lambda * s * s) * s;
    if !(-1.0..=1.0).contains(&arg) {
        return Err(Error::Evanescent(arg));
    }
    Ok(arg.asin() / (lambda * kh))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn cd_zero_mode_is_identity() {
        let q = symbol(SchemeKind::Cd, 0.0, &[0.0], &[0.7], Direction::Forward).unwrap();
        assert!(close(&q.matrix, &CMatrix::identity(2, 2), 0.0));
    }

    #[test]
    fn lf_quarter_wave() {
        let q = symbol(SchemeKind::Lf, 0.0, &[PI / 2.0], &[1.0], Direction::Forward).unwrap();
        let expect = a1d() * I;
        assert!(close(&q.matrix, &expect, 1e-15));
    }

    #[test]
    fn ls_kinds_have_no_symbol() {
        assert!(symbol(SchemeKind::LsCd, 0.0, &[0.1], &[0.5], Direction::Forward).is_err());
    }

    #[test]
    fn identity_bfecc() {
        let id = CMatrix::identity(3, 3);
        assert!(close(&bfecc_symbol(&id, &id).unwrap(), &id, 0.0));
        assert!(bfecc_symbol(&id, &CMatrix::identity(2, 2)).is_err());
    }

    #[test]
    fn closed_form_bounds() {
        let h = 0.01;
        assert!((cfl_bound(SchemeKind::Cd, 0.0, &[h]).unwrap() - 3f64.sqrt() * h).abs() < 1e-15);
        assert!((cfl_bound(SchemeKind::Cd, 0.0, &[h, h]).unwrap() - (1.5f64).sqrt() * h).abs() < 1e-15);
        assert!((cfl_bound(SchemeKind::Lf, 0.0, &[h, h]).unwrap() - 2f64.sqrt() * h).abs() < 1e-15);
        assert!((cfl_bound(SchemeKind::Lf, 0.0, &[h, h, h]).unwrap() - (4.0f64 / 3.0).sqrt() * h).abs() < 1e-15);
    }

    #[test]
    fn phase_speed_limits() {
        assert!((phase_speed(0.7, 1e-6).unwrap() - 1.0).abs() < 1e-9);
        let v = phase_speed(3f64.sqrt(), PI / 2.0).unwrap();
        let expect = (-(3f64.sqrt()) / 2.0).asin() / (3f64.sqrt() * PI / 2.0);
        assert!((v - expect).abs() < 1e-15);
        assert!(v < 0.0);
        assert!(matches!(phase_speed(2.0, PI / 2.0), Err(Error::Evanescent(_))));
    }
}
