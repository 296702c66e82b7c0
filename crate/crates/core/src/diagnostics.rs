//! Error norms, the numerical divergence of H, convergence orders and CSV
//! export.

use std::io::Write;

use crate::bfecc::FieldSet;
use crate::error::{Error, Result};
use crate::exec;
use crate::grid::{Boundary, Grid2};
use crate::schemes::FieldState2;

/// Central-difference `∂Hx/∂x + ∂Hy/∂y` on a uniform periodic grid.
pub fn numerical_divergence_h(state: &FieldState2, grid: &Grid2) -> Result<Vec<f64>> {
    if !grid.is_uniform() || grid.boundary() != Boundary::Periodic {
        return Err(Error::SchemeGridMismatch {
            scheme: "divergence".into(),
            reason: "defined on uniform periodic grids only".into(),
        });
    }
    if state.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: state.len() });
    }
    let (ax, ay) = (0.5 / grid.dx(), 0.5 / grid.dy());
    let ny = grid.ny();
    Ok(exec::map_range(grid.len(), |k| {
        let nb = grid.stencil_indices(k / ny, k % ny).expect("periodic");
        ax * (state.hx[nb[2]] - state.hx[nb[1]]) + ay * (state.hy[nb[4]] - state.hy[nb[3]])
    }))
}

/// How the per-point, per-component differences are reduced to one number.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormConvention {
    /// `√(Σ_points Σ_components d² / (N_points · N_components))`.
    Rms,
    /// Sum over components of each component's RMS.
    ComponentSum,
    /// RMS of a single component.
    Component(usize),
    /// `√(Σ_points Σ_components d²)`.
    Unnormalized,
}

impl std::str::FromStr for NormConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rms" => Ok(NormConvention::Rms),
            "component_sum" => Ok(NormConvention::ComponentSum),
            "unnormalized" => Ok(NormConvention::Unnormalized),
            _ => s
                .strip_prefix("component:")
                .and_then(|c| c.parse().ok())
                .map(NormConvention::Component)
                .ok_or_else(|| Error::Config(format!("unknown norm {s:?}"))),
        }
    }
}

fn check_shapes<S: FieldSet>(a: &S, b: &S) -> Result<()> {
    let (pa, pb) = (a.parts(), b.parts());
    if pa.len() != pb.len() {
        return Err(Error::LengthMismatch { expected: pa.len(), got: pb.len() });
    }
    for (x, y) in pa.iter().zip(&pb) {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch { expected: y.len(), got: x.len() });
        }
    }
    Ok(())
}

/// Per-component `Σ_points d²`.
pub fn component_sq_sums<S: FieldSet>(numeric: &S, reference: &S) -> Result<Vec<f64>> {
    check_shapes(numeric, reference)?;
    Ok(numeric
        .parts()
        .into_iter()
        .zip(reference.parts())
        .map(|(a, b)| exec::sum_range(a.len(), |k| (a[k] - b[k]).powi(2)))
        .collect())
}

/// Per-component RMS differences.
pub fn component_rms<S: FieldSet>(numeric: &S, reference: &S) -> Result<Vec<f64>> {
    let n = numeric.parts()[0].len() as f64;
    Ok(component_sq_sums(numeric, reference)?.into_iter().map(|s| (s / n).sqrt()).collect())
}

pub fn l2_error_with<S: FieldSet>(numeric: &S, reference: &S, norm: NormConvention) -> Result<f64> {
    let sums = component_sq_sums(numeric, reference)?;
    let n = numeric.parts()[0].len() as f64;
    match norm {
        NormConvention::Rms => Ok((sums.iter().sum::<f64>() / (n * sums.len() as f64)).sqrt()),
        NormConvention::ComponentSum => Ok(sums.iter().map(|s| (s / n).sqrt()).sum()),
        NormConvention::Unnormalized => Ok(sums.iter().sum::<f64>().sqrt()),
        NormConvention::Component(c) => sums
            .get(c)
            .map(|s| (s / n).sqrt())
            .ok_or_else(|| Error::InvalidParameter(format!("no component {c}"))),
    }
}

/// RMS over all points and components.
pub fn l2_error<S: FieldSet>(numeric: &S, reference: &S) -> Result<f64> {
    l2_error_with(numeric, reference, NormConvention::Rms)
}

/// Sample a fine-grid field at the coarse grid's points by nearest logical
/// index (exact for dyadic refinements of the same lattice).
pub fn restrict(fine: &FieldState2, fine_grid: &Grid2, coarse_grid: &Grid2) -> Result<FieldState2> {
    if fine.len() != fine_grid.len() {
        return Err(Error::LengthMismatch { expected: fine_grid.len(), got: fine.len() });
    }
    let fd = fine_grid.domain();
    let mut out = FieldState2::zeros(coarse_grid.len());
    for i in 0..coarse_grid.nx() {
        for j in 0..coarse_grid.ny() {
            let p = coarse_grid.rect_point(i, j);
            let fi = ((p[0] - fd.x0) / fine_grid.dx()).round();
            let fj = ((p[1] - fd.y0) / fine_grid.dy()).round();
            if fi < 0.0 || fj < 0.0 || fi as usize >= fine_grid.nx() || fj as usize >= fine_grid.ny() {
                return Err(Error::InvalidParameter(format!(
                    "coarse point {p:?} lies outside the reference grid"
                )));
            }
            let kf = fine_grid.idx(fi as usize, fj as usize);
            let kc = coarse_grid.idx(i, j);
            out.hx[kc] = fine.hx[kf];
            out.hy[kc] = fine.hy[kf];
            out.ez[kc] = fine.ez[kf];
        }
    }
    Ok(out)
}

/// `log₂(e_{i−1} / e_i)` for successive 2× refinements.
pub fn convergence_orders(errors: &[f64]) -> Result<Vec<f64>> {
    if errors.len() < 2 {
        return Err(Error::InvalidParameter("need at least two errors".into()));
    }
    if let Some(bad) = errors.iter().find(|e| !(**e > 0.0)) {
        return Err(Error::NonPositiveError(*bad));
    }
    Ok(errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub label: String,
    pub n: usize,
    pub h: f64,
    pub dt: f64,
    pub l2_error: f64,
    /// Order against the previous (2× coarser) entry.
    pub order: Option<f64>,
}

/// Fill in `order` for a sequence of dyadic reports.
pub fn attach_orders(reports: &mut [ErrorReport]) {
    for k in 1..reports.len() {
        let (a, b) = (reports[k - 1].l2_error, reports[k].l2_error);
        reports[k].order = (a > 0.0 && b > 0.0).then(|| (a / b).log2());
    }
}

pub fn write_error_csv<W: Write>(reports: &[ErrorReport], mut w: W) -> std::io::Result<()> {
    writeln!(w, "grid,n,h,dt,l2_error,order")?;
    for r in reports {
        let order = r.order.map(|o| format!("{o:.5e}")).unwrap_or_default();
        writeln!(w, "{},{},{:.5e},{:.5e},{:.5e},{}", r.label, r.n, r.h, r.dt, r.l2_error, order)?;
    }
    Ok(())
}

pub fn write_snapshot<W: Write>(grid: &Grid2, state: &FieldState2, mut w: W) -> std::io::Result<()> {
    writeln!(w, "i,j,x,y,Ez,Hx,Hy")?;
    for i in 0..grid.nx() {
        for j in 0..grid.ny() {
            let k = grid.idx(i, j);
            let p = grid.point(i, j);
            writeln!(
                w,
                "{i},{j},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                p[0], p[1], state.ez[k], state.hx[k], state.hy[k]
            )?;
        }
    }
    Ok(())
}
