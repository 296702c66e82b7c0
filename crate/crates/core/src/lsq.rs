//! Local linear least-squares fits on small stencils.
//!
//! A fit of `u ~ a + b x + c y` over stencil offsets is a fixed linear map
//! of the stencil values, so the map itself ([`FitWeights`]) can be cached
//! per grid point and reused every step.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::Point;

/// Relative singular-value floor below which a stencil is rejected.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub a_hat: f64,
    pub b_hat: f64,
    pub c_hat: f64,
    pub sigma_min: f64,
}

/// Rows of the pseudo-inverse of the design matrix: value, d/dx and d/dy
/// weights over the stencil points.
#[derive(Clone, Debug, PartialEq)]
pub struct FitWeights {
    pub value: Vec<f64>,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub sigma_min: f64,
}

impl FitWeights {
    pub fn apply(&self, values: &[f64]) -> LinearFit {
        let dot = |w: &[f64]| w.iter().zip(values).map(|(a, b)| a * b).sum::<f64>();
        LinearFit {
            a_hat: dot(&self.value),
            b_hat: dot(&self.dx),
            c_hat: dot(&self.dy),
            sigma_min: self.sigma_min,
        }
    }
}

fn design(points: &[Point]) -> DMatrix<f64> {
    DMatrix::from_fn(points.len(), 3, |r, c| match c {
        0 => 1.0,
        1 => points[r][0],
        _ => points[r][1],
    })
}

fn check_shape(points: &[Point]) -> Result<()> {
    if points.len() < 3 {
        return Err(Error::TooFewStencilPoints(points.len()));
    }
    Ok(())
}

/// Singular values of the design matrix, descending.
pub fn singular_values(points: &[Point]) -> Vec<f64> {
    let mut s: Vec<f64> = design(points).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn stencil_radius(points: &[Point]) -> f64 {
    points.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max)
}

/// Least-squares weights for a stencil given as offsets from its center.
pub fn fit_weights(points: &[Point]) -> Result<FitWeights> {
    check_shape(points)?;
    let a = design(points);
    let svd = a.svd(true, true);
    let sigma_min = svd.singular_values.min();
    let threshold = RANK_TOL * stencil_radius(points);
    if !(sigma_min > threshold) {
        return Err(Error::RankDeficient { sigma_min, threshold });
    }
    let pinv = svd
        .pseudo_inverse(0.0)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(FitWeights {
        value: pinv.row(0).iter().copied().collect(),
        dx: pinv.row(1).iter().copied().collect(),
        dy: pinv.row(2).iter().copied().collect(),
        sigma_min,
    })
}

/// Fit `u ~ a + b x + c y` to `values` at the offsets `points`.
pub fn fit_local_linear(points: &[Point], values: &[f64]) -> Result<LinearFit> {
    check_shape(points)?;
    if values.len() != points.len() {
        return Err(Error::LengthMismatch { expected: points.len(), got: values.len() });
    }
    let a = design(points);
    let svd = a.svd(true, true);
    let sigma_min = svd.singular_values.min();
    let threshold = RANK_TOL * stencil_radius(points);
    if !(sigma_min > threshold) {
        return Err(Error::RankDeficient { sigma_min, threshold });
    }
    let rhs = DVector::from_column_slice(values);
    let theta = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(LinearFit { a_hat: theta[0], b_hat: theta[1], c_hat: theta[2], sigma_min })
}

/// A smooth scalar field with a known gradient.
pub trait SmoothField {
    fn value(&self, p: Point) -> f64;
    fn gradient(&self, p: Point) -> [f64; 2];
}

#[derive(Clone, Debug)]
pub struct FitConvergence {
    pub hs: Vec<f64>,
    pub gradient_errors: Vec<f64>,
    pub value_errors: Vec<f64>,
    pub gradient_rate: f64,
    pub value_rate: f64,
}

/// Fit at `center` on the stencil `offsets(h)` for each `h` and measure how
/// fast the gradient and value errors decay.
pub fn gradient_error_bound_check<S, F>(
    offsets: S,
    field: &F,
    center: Point,
    hs: &[f64],
) -> Result<FitConvergence>
where
    S: Fn(f64) -> Vec<Point>,
    F: SmoothField + ?Sized,
{
    let mut gradient_errors = Vec::with_capacity(hs.len());
    let mut value_errors = Vec::with_capacity(hs.len());
    for &h in hs {
        let pts = offsets(h);
        let vals: Vec<f64> = pts
            .iter()
            .map(|o| field.value([center[0] + o[0], center[1] + o[1]]))
            .collect();
        let fit = fit_local_linear(&pts, &vals)?;
        let g = field.gradient(center);
        gradient_errors.push((fit.b_hat - g[0]).hypot(fit.c_hat - g[1]));
        value_errors.push((fit.a_hat - field.value(center)).abs());
    }
    Ok(FitConvergence {
        gradient_rate: log_log_slope(hs, &gradient_errors),
        value_rate: log_log_slope(hs, &value_errors),
        hs: hs.to_vec(),
        gradient_errors,
        value_errors,
    })
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Center plus its four axis neighbors at distance `h`.
pub fn cross_stencil(h: f64) -> Vec<Point> {
    vec![[0.0, 0.0], [-h, 0.0], [h, 0.0], [0.0, -h], [0.0, h]]
}
