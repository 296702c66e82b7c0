//! Convolutional PML coefficients and accumulators, and the
//! total-field/scattered-field plane-wave source.
//!
//! Inside the layer a derivative `∂` is replaced by `(1 + c) ∂ⁿ + b Ψⁿ⁻¹`
//! and the accumulator follows `Ψⁿ = b Ψⁿ⁻¹ + c ∂ⁿ` with `b = exp(−σ Δt)`,
//! `c = b − 1`. The kernel lives in [`crate::schemes`]; this module owns the
//! per-point data.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid2, Point, Rect};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PmlConfig {
    /// Layer thickness in cells.
    pub cells: usize,
    /// Peak conductivity in units of `1/Δx`.
    pub sigma_max: f64,
    /// Polynomial grading exponent.
    pub exponent: f64,
}

impl Default for PmlConfig {
    fn default() -> Self {
        PmlConfig { cells: 10, sigma_max: 8.0, exponent: 3.0 }
    }
}

impl PmlConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cells < 4 {
            return Err(Error::InvalidParameter(format!(
                "pml needs at least 4 cells, got {}",
                self.cells
            )));
        }
        if !(self.sigma_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pml sigma_max must be positive, got {}",
                self.sigma_max
            )));
        }
        if !(self.exponent >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "pml exponent must be at least 1, got {}",
                self.exponent
            )));
        }
        Ok(())
    }
}

/// `(b, c)` for conductivity `sigma` and step `dt`.
pub fn coefficients(sigma: f64, dt: f64) -> (f64, f64) {
    let b = (-sigma * dt).exp();
    (b, b - 1.0)
}

/// Graded `(σ, b, c)` at depths `0..=cells` (depth in cells into the layer).
pub fn pml_coefficients(cfg: &PmlConfig, dx: f64, dt: f64) -> Result<Vec<(f64, f64, f64)>> {
    cfg.validate()?;
    Ok((0..=cfg.cells)
        .map(|depth| {
            let sigma = sigma_at(cfg, dx, depth);
            let (b, c) = coefficients(sigma, dt);
            (sigma, b, c)
        })
        .collect())
}

fn sigma_at(cfg: &PmlConfig, dx: f64, depth: usize) -> f64 {
    if depth == 0 {
        return 0.0;
    }
    cfg.sigma_max / dx * (depth as f64 / cfg.cells as f64).powf(cfg.exponent)
}

/// Depth of index `i` into a layer of `cells` cells on an axis of `n` points.
pub fn layer_depth(i: usize, n: usize, cells: usize) -> usize {
    let hi = n - 1 - cells;
    if i < cells {
        cells - i
    } else {
        i.saturating_sub(hi)
    }
}

#[derive(Clone, Debug)]
pub struct PmlState {
    pub cells: usize,
    /// Points updated with the stretched-derivative form.
    pub active: Vec<bool>,
    pub sigma_x: Vec<f64>,
    pub sigma_y: Vec<f64>,
    pub bx: Vec<f64>,
    pub by: Vec<f64>,
    pub cx: Vec<f64>,
    pub cy: Vec<f64>,
    pub psi_ezx: Vec<f64>,
    pub psi_ezy: Vec<f64>,
    pub psi_hxy: Vec<f64>,
    pub psi_hyx: Vec<f64>,
}

impl PmlState {
    /// Layer data for a bounded grid whose outer `cfg.cells` rings form the
    /// absorbing collar.
    pub fn new(grid: &Grid2, cfg: &PmlConfig, dt: f64) -> Result<Self> {
        cfg.validate()?;
        if grid.boundary() != Boundary::Bounded {
            return Err(Error::InvalidParameter("pml requires a bounded grid".into()));
        }
        let d = cfg.cells;
        if grid.nx() < 2 * d + 3 || grid.ny() < 2 * d + 3 {
            return Err(Error::InvalidParameter(format!(
                "grid {}x{} too small for a {d}-cell pml",
                grid.nx(),
                grid.ny()
            )));
        }
        let n = grid.len();
        let mut st = PmlState {
            cells: d,
            active: vec![false; n],
            sigma_x: vec![0.0; n],
            sigma_y: vec![0.0; n],
            bx: vec![1.0; n],
            by: vec![1.0; n],
            cx: vec![0.0; n],
            cy: vec![0.0; n],
            psi_ezx: vec![0.0; n],
            psi_ezy: vec![0.0; n],
            psi_hxy: vec![0.0; n],
            psi_hyx: vec![0.0; n],
        };
        for i in 0..grid.nx() {
            for j in 0..grid.ny() {
                let k = grid.idx(i, j);
                let sx = sigma_at(cfg, grid.dx(), layer_depth(i, grid.nx(), d));
                let sy = sigma_at(cfg, grid.dy(), layer_depth(j, grid.ny(), d));
                let (bx, cx) = coefficients(sx, dt);
                let (by, cy) = coefficients(sy, dt);
                st.active[k] = sx > 0.0 || sy > 0.0;
                st.sigma_x[k] = sx;
                st.sigma_y[k] = sy;
                st.bx[k] = bx;
                st.by[k] = by;
                st.cx[k] = cx;
                st.cy[k] = cy;
            }
        }
        Ok(st)
    }

    /// Zero conductivity, but every point takes the layer code path.
    pub fn transparent(n: usize) -> Self {
        PmlState {
            cells: 0,
            active: vec![true; n],
            sigma_x: vec![0.0; n],
            sigma_y: vec![0.0; n],
            bx: vec![1.0; n],
            by: vec![1.0; n],
            cx: vec![0.0; n],
            cy: vec![0.0; n],
            psi_ezx: vec![0.0; n],
            psi_ezy: vec![0.0; n],
            psi_hxy: vec![0.0; n],
            psi_hyx: vec![0.0; n],
        }
    }

    #[inline]
    pub fn is_active(&self, k: usize) -> bool {
        self.active[k]
    }

    pub fn reset(&mut self) {
        for v in [&mut self.psi_ezx, &mut self.psi_ezy, &mut self.psi_hxy, &mut self.psi_hyx] {
            v.iter_mut().for_each(|x| *x = 0.0);
        }
    }
}

/// When TF/SF corrections enter a BFECC step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TfsfPlacement {
    /// In every substep, at that substep's start time.
    EverySubstep,
    /// In the last substep only, at `tₙ`.
    FinalSubstep,
}

/// Plane wave `Ez = A r(τ) sin(ω(k̂·x − t))`, `Hx = sin φ · Ez`,
/// `Hy = −cos φ · Ez`, confined to the closed rectangle `rect`.
///
/// `r` is a `sin²` ramp in the retarded time `τ` measured from the first
/// corner of `rect` the wave reaches, so the switched-on wave is still an
/// exact solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TfsfSource {
    pub rect: Rect,
    pub omega: f64,
    pub amplitude: f64,
    /// Propagation angle from the +x axis.
    pub angle: f64,
    /// Ramp duration; zero switches the wave on abruptly.
    pub ramp: f64,
}

impl TfsfSource {
    pub fn plane_wave(rect: Rect, omega: f64, amplitude: f64) -> Self {
        TfsfSource { rect, omega, amplitude, angle: 0.0, ramp: 2.0 * PI / omega }
    }

    fn front(&self) -> f64 {
        let (c, s) = (self.angle.cos(), self.angle.sin());
        [
            [self.rect.x0, self.rect.y0],
            [self.rect.x1, self.rect.y0],
            [self.rect.x0, self.rect.y1],
            [self.rect.x1, self.rect.y1],
        ]
        .iter()
        .map(|p| c * p[0] + s * p[1])
        .fold(f64::INFINITY, f64::min)
    }

    pub fn envelope(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            0.0
        } else if tau >= self.ramp {
            1.0
        } else {
            (0.5 * PI * tau / self.ramp).sin().powi(2)
        }
    }

    /// Incident `[Hx, Hy, Ez]` at `p`, time `t`.
    pub fn incident(&self, p: Point, t: f64) -> [f64; 3] {
        let (c, s) = (self.angle.cos(), self.angle.sin());
        let xi = c * p[0] + s * p[1];
        let tau = t - (xi - self.front());
        let ez = self.amplitude * self.envelope(tau) * (self.omega * (xi - t)).sin();
        [s * ez, -c * ez, ez]
    }

    pub fn contains(&self, p: Point) -> bool {
        self.rect.contains(p)
    }

    /// Reject rectangles whose boundary stencils would reach the PML collar.
    pub fn validate(&self, grid: &Grid2, pml_cells: usize) -> Result<()> {
        if !(self.omega > 0.0) {
            return Err(Error::InvalidParameter(format!("tfsf omega must be positive, got {}", self.omega)));
        }
        let dom = grid.domain();
        let gap = pml_cells as f64 + 1.0;
        let inner = Rect::new(
            dom.x0 + gap * grid.dx(),
            dom.y0 + gap * grid.dy(),
            dom.x1 - gap * grid.dx(),
            dom.y1 - gap * grid.dy(),
        );
        let r = self.rect;
        let tol = 1e-9 * grid.dx().min(grid.dy());
        if !(r.x0 > inner.x0 - tol && r.y0 > inner.y0 - tol && r.x1 < inner.x1 + tol && r.y1 < inner.y1 + tol)
            || !(r.x1 > r.x0 && r.y1 > r.y0)
        {
            return Err(Error::InvalidParameter(format!(
                "tfsf rectangle {r:?} touches the pml or is empty"
            )));
        }
        Ok(())
    }
}
