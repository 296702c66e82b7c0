//! Underlying one-step schemes for 1D and 2D TMz Maxwell.
//!
//! 1D: `ε E_t = H_x`, `μ H_t = E_x`. 2D TMz with components `(Hx, Hy, Ez)`:
//! `μ ∂Hx/∂t = −∂Ez/∂y`, `μ ∂Hy/∂t = ∂Ez/∂x`, `ε ∂Ez/∂t = ∂Hy/∂x − ∂Hx/∂y`.
//!
//! Every 2D scheme is written as a 5-point update with a value stencil `w`
//! and derivative stencils `gx`, `gy`; the schemes differ only in those
//! weights.

use std::fmt;
use std::str::FromStr;

use crate::bfecc::{FieldSet, Operator, Pass};
use crate::error::{Error, Result};
use crate::exec;
use crate::grid::{Grid2, Point};
use crate::lsq;
use crate::pml::{PmlConfig, PmlState, TfsfPlacement, TfsfSource};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Cd,
    Lf,
    Theta,
    LsCd,
    LsTheta,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 5] =
        [SchemeKind::Cd, SchemeKind::Lf, SchemeKind::Theta, SchemeKind::LsCd, SchemeKind::LsTheta];

    pub fn is_least_squares(self) -> bool {
        matches!(self, SchemeKind::LsCd | SchemeKind::LsTheta)
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Cd => "cd",
            SchemeKind::Lf => "lf",
            SchemeKind::Theta => "theta",
            SchemeKind::LsCd => "ls_cd",
            SchemeKind::LsTheta => "ls_theta",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown scheme {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    /// Blend toward Lax-Friedrichs; read only for `Theta`.
    pub theta: f64,
    pub dt: f64,
    pub direction: Direction,
}

impl SchemeSpec {
    pub fn new(kind: SchemeKind, dt: f64) -> Self {
        SchemeSpec { kind, theta: 0.5, dt, direction: Direction::Forward }
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn backward(mut self) -> Self {
        self.direction = self.direction.reversed();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in [0, 1], got {}",
                self.theta
            )));
        }
        Ok(())
    }

    /// Weight of the neighbor average for the uniform-grid kinds.
    pub fn blend(&self) -> f64 {
        match self.kind {
            SchemeKind::Cd | SchemeKind::LsCd => 0.0,
            SchemeKind::Lf => 1.0,
            SchemeKind::Theta => self.theta,
            SchemeKind::LsTheta => 0.8,
        }
    }

    fn pass_sign(&self, pass: Pass) -> f64 {
        match pass {
            Pass::Forward | Pass::Final => self.direction.sign(),
            Pass::Backward => -self.direction.sign(),
        }
    }
}

/// Per-point relative permittivity and permeability.
#[derive(Clone, Debug, PartialEq)]
pub struct Media {
    pub eps: Vec<f64>,
    pub mu: Vec<f64>,
}

impl Media {
    pub fn vacuum(n: usize) -> Self {
        Media { eps: vec![1.0; n], mu: vec![1.0; n] }
    }

    /// Sample `f(point) -> (ε, μ)` at every point.
    pub fn sample<F: Fn(Point) -> (f64, f64)>(points: &[Point], f: F) -> Self {
        let (eps, mu) = points.iter().map(|&p| f(p)).unzip();
        Media { eps, mu }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for v in [&self.eps, &self.mu] {
            if v.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: v.len() });
            }
        }
        if let Some(bad) = self.eps.iter().chain(&self.mu).find(|v| !(**v > 0.0)) {
            return Err(Error::InvalidParameter(format!("material coefficient {bad} is not positive")));
        }
        Ok(())
    }

    fn inverses(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.eps.iter().map(|e| 1.0 / e).collect(),
            self.mu.iter().map(|m| 1.0 / m).collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldState1 {
    pub e: Vec<f64>,
    pub h: Vec<f64>,
}

impl FieldState1 {
    pub fn zeros(n: usize) -> Self {
        FieldState1 { e: vec![0.0; n], h: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }
}

impl FieldSet for FieldState1 {
    fn parts(&self) -> Vec<&[f64]> {
        vec![&self.e, &self.h]
    }

    fn parts_mut(&mut self) -> Vec<&mut [f64]> {
        vec![&mut self.e, &mut self.h]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldState2 {
    pub hx: Vec<f64>,
    pub hy: Vec<f64>,
    pub ez: Vec<f64>,
}

impl FieldState2 {
    pub fn zeros(n: usize) -> Self {
        FieldState2 { hx: vec![0.0; n], hy: vec![0.0; n], ez: vec![0.0; n] }
    }

    /// Sample `f(point) -> [Hx, Hy, Ez]` at every grid point.
    pub fn sample<F: Fn(Point) -> [f64; 3]>(grid: &Grid2, f: F) -> Self {
        let mut s = FieldState2::zeros(grid.len());
        for (k, &p) in grid.coords().iter().enumerate() {
            let [hx, hy, ez] = f(p);
            s.hx[k] = hx;
            s.hy[k] = hy;
            s.ez[k] = ez;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.ez.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ez.is_empty()
    }
}

impl FieldSet for FieldState2 {
    fn parts(&self) -> Vec<&[f64]> {
        vec![&self.hx, &self.hy, &self.ez]
    }

    fn parts_mut(&mut self) -> Vec<&mut [f64]> {
        vec![&mut self.hx, &mut self.hy, &mut self.ez]
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}

/// 1D scheme on a periodic uniform grid.
#[derive(Clone, Debug)]
pub struct Scheme1 {
    spec: SchemeSpec,
    dx: f64,
    inv_eps: Vec<f64>,
    inv_mu: Vec<f64>,
}

impl Scheme1 {
    pub fn new(spec: SchemeSpec, dx: f64, n: usize) -> Result<Self> {
        Scheme1::with_media(spec, dx, &Media::vacuum(n))
    }

    pub fn with_media(spec: SchemeSpec, dx: f64, media: &Media) -> Result<Self> {
        spec.validate()?;
        if spec.kind.is_least_squares() {
            return Err(Error::SchemeGridMismatch {
                scheme: spec.kind.to_string(),
                reason: "least-squares schemes are two-dimensional".into(),
            });
        }
        if !(dx > 0.0) {
            return Err(Error::InvalidParameter(format!("dx must be positive, got {dx}")));
        }
        let n = media.eps.len();
        if n < 3 {
            return Err(Error::TooFewPoints { nx: n, ny: 1 });
        }
        media.validate(n)?;
        let (inv_eps, inv_mu) = media.inverses();
        Ok(Scheme1 { spec, dx, inv_eps, inv_mu })
    }

    pub fn spec(&self) -> &SchemeSpec {
        &self.spec
    }

    pub fn lambda(&self) -> f64 {
        self.spec.dt / self.dx
    }

    fn kernel(&self, u: &FieldState1, out: &mut FieldState1, sign: f64) {
        let n = u.len();
        let half = 0.5 * sign * self.lambda();
        let th = self.spec.blend();
        let keep = 1.0 - th;
        let (e, h) = (&u.e, &u.h);
        exec::rows2_mut(n, &mut out.e, &mut out.h, |_, oe, oh| {
            for j in 0..n {
                let jm = if j == 0 { n - 1 } else { j - 1 };
                let jp = if j + 1 == n { 0 } else { j + 1 };
                oe[j] = keep * e[j]
                    + th * 0.5 * (e[jm] + e[jp])
                    + half * self.inv_eps[j] * (h[jp] - h[jm]);
                oh[j] = keep * h[j]
                    + th * 0.5 * (h[jm] + h[jp])
                    + half * self.inv_mu[j] * (e[jp] - e[jm]);
            }
        });
    }
}

impl Operator for Scheme1 {
    type State = FieldState1;

    fn dt(&self) -> f64 {
        self.spec.dt
    }

    fn apply(&mut self, input: &FieldState1, output: &mut FieldState1, pass: Pass, _t: f64) -> Result<()> {
        let n = self.inv_eps.len();
        check_len(n, input.e.len())?;
        check_len(n, input.h.len())?;
        check_len(n, output.e.len())?;
        check_len(n, output.h.len())?;
        self.kernel(input, output, self.spec.pass_sign(pass));
        Ok(())
    }
}

/// One step of a 1D scheme in the direction given by `spec`.
pub fn step_1d(spec: SchemeSpec, state: &FieldState1, dx: f64) -> Result<FieldState1> {
    let mut op = Scheme1::new(spec, dx, state.len())?;
    let mut out = FieldState1::zeros(state.len());
    op.apply(state, &mut out, Pass::Forward, 0.0)?;
    Ok(out)
}

/// Value and derivative weights over the 5-point stencil
/// (center, west, east, south, north).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointWeights {
    pub w: [f64; 5],
    pub gx: [f64; 5],
    pub gy: [f64; 5],
}

impl PointWeights {
    pub const ZERO: PointWeights = PointWeights { w: [0.0; 5], gx: [0.0; 5], gy: [0.0; 5] };

    /// `(1 − θ)` central difference plus `θ` times the four-neighbor average.
    pub fn uniform(theta: f64, dx: f64, dy: f64) -> Self {
        let q = 0.25 * theta;
        let (ax, ay) = (0.5 / dx, 0.5 / dy);
        PointWeights {
            w: [1.0 - theta, q, q, q, q],
            gx: [0.0, -ax, ax, 0.0, 0.0],
            gy: [0.0, 0.0, 0.0, -ay, ay],
        }
    }

    fn least_squares(fit: &lsq::FitWeights, use_value: bool) -> Self {
        let mut p = PointWeights::ZERO;
        for s in 0..5 {
            p.w[s] = if use_value { fit.value[s] } else if s == 0 { 1.0 } else { 0.0 };
            p.gx[s] = fit.dx[s];
            p.gy[s] = fit.dy[s];
        }
        p
    }
}

/// How least-squares fits are obtained during a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LsqMode {
    /// Fit weights computed once from the (static) geometry.
    Cached,
    /// Every point refitted from its field values in every application.
    Recompute,
}

#[derive(Clone, Debug)]
enum Weights {
    Uniform(PointWeights),
    PerPoint(Vec<PointWeights>),
}

#[derive(Clone, Copy, Debug)]
struct TfsfEntry {
    k: usize,
    q: usize,
    w: f64,
    gx: f64,
    gy: f64,
    sign: f64,
}

#[derive(Clone, Debug)]
struct Tfsf {
    source: TfsfSource,
    placement: TfsfPlacement,
    entries: Vec<TfsfEntry>,
}

#[derive(Clone, Copy, Debug, Default)]
struct Terms {
    v_hx: f64,
    v_hy: f64,
    v_ez: f64,
    dx_ez: f64,
    dy_ez: f64,
    dx_hy: f64,
    dy_hx: f64,
}

/// 2D TMz scheme with optional materials, CPML collar and TF/SF source.
#[derive(Clone, Debug)]
pub struct Scheme2 {
    spec: SchemeSpec,
    grid: Grid2,
    inv_eps: Vec<f64>,
    inv_mu: Vec<f64>,
    weights: Weights,
    mode: LsqMode,
    pml: Option<PmlState>,
    tfsf: Option<Tfsf>,
}

impl Scheme2 {
    pub fn new(spec: SchemeSpec, grid: &Grid2) -> Result<Self> {
        spec.validate()?;
        let weights = if spec.kind.is_least_squares() {
            let use_value = spec.kind == SchemeKind::LsTheta;
            let per = exec::map_range(grid.len(), |k| {
                let (i, j) = (k / grid.ny(), k % grid.ny());
                if grid.is_boundary_index(i, j) {
                    return Ok(PointWeights::ZERO);
                }
                let rel = relative_stencil(grid, i, j)?;
                let fit = lsq::fit_weights(&rel)?;
                Ok(PointWeights::least_squares(&fit, use_value))
            });
            Weights::PerPoint(per.into_iter().collect::<Result<Vec<_>>>()?)
        } else {
            if !grid.is_uniform() {
                return Err(Error::SchemeGridMismatch {
                    scheme: spec.kind.to_string(),
                    reason: "needs a uniform rectangular grid".into(),
                });
            }
            Weights::Uniform(PointWeights::uniform(spec.blend(), grid.dx(), grid.dy()))
        };
        let n = grid.len();
        Ok(Scheme2 {
            spec,
            grid: grid.clone(),
            inv_eps: vec![1.0; n],
            inv_mu: vec![1.0; n],
            weights,
            mode: LsqMode::Cached,
            pml: None,
            tfsf: None,
        })
    }

    pub fn with_media(mut self, media: &Media) -> Result<Self> {
        media.validate(self.grid.len())?;
        let (ie, im) = media.inverses();
        self.inv_eps = ie;
        self.inv_mu = im;
        Ok(self)
    }

    pub fn with_lsq_mode(mut self, mode: LsqMode) -> Result<Self> {
        if mode == LsqMode::Recompute && !self.spec.kind.is_least_squares() {
            return Err(Error::InvalidParameter(format!(
                "{} does not use least-squares fits",
                self.spec.kind
            )));
        }
        self.mode = mode;
        Ok(self)
    }

    pub fn with_pml(self, cfg: &PmlConfig) -> Result<Self> {
        let st = PmlState::new(&self.grid, cfg, self.spec.dt)?;
        self.with_pml_state(st)
    }

    pub fn with_pml_state(mut self, st: PmlState) -> Result<Self> {
        check_len(self.grid.len(), st.active.len())?;
        self.pml = Some(st);
        Ok(self)
    }

    pub fn with_tfsf(mut self, source: TfsfSource, placement: TfsfPlacement) -> Result<Self> {
        let cells = self.pml.as_ref().map_or(0, |p| p.cells);
        source.validate(&self.grid, cells)?;
        let g = &self.grid;
        let tol = 1e-9 * g.dx().min(g.dy());
        let inside: Vec<bool> = (0..g.len())
            .map(|k| source.rect.contains_within(g.rect_point(k / g.ny(), k % g.ny()), tol))
            .collect();
        let mut entries = Vec::new();
        for i in 0..g.nx() {
            for j in 0..g.ny() {
                let Some(nb) = g.stencil_indices(i, j) else { continue };
                let k = nb[0];
                let pw = self.weights_at(k);
                for (s, &q) in nb.iter().enumerate().skip(1) {
                    if inside[k] == inside[q] {
                        continue;
                    }
                    let (w, gx, gy) = (pw.w[s], pw.gx[s], pw.gy[s]);
                    if w == 0.0 && gx == 0.0 && gy == 0.0 {
                        continue;
                    }
                    let sign = if inside[k] { 1.0 } else { -1.0 };
                    entries.push(TfsfEntry { k, q, w, gx, gy, sign });
                }
            }
        }
        self.tfsf = Some(Tfsf { source, placement, entries });
        Ok(self)
    }

    pub fn spec(&self) -> &SchemeSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid2 {
        &self.grid
    }

    pub fn pml(&self) -> Option<&PmlState> {
        self.pml.as_ref()
    }

    pub fn pml_mut(&mut self) -> Option<&mut PmlState> {
        self.pml.as_mut()
    }

    pub fn tfsf_source(&self) -> Option<&TfsfSource> {
        self.tfsf.as_ref().map(|t| &t.source)
    }

    pub fn weights_at(&self, k: usize) -> PointWeights {
        match &self.weights {
            Weights::Uniform(p) => *p,
            Weights::PerPoint(v) => v[k],
        }
    }

    #[inline]
    fn terms(&self, i: usize, j: usize, nb: &[usize; 5], u: &FieldState2) -> Terms {
        if self.mode == LsqMode::Recompute {
            return self.fitted_terms(i, j, nb, u);
        }
        let p = match &self.weights {
            Weights::Uniform(p) => p,
            Weights::PerPoint(v) => &v[nb[0]],
        };
        let dot = |w: &[f64; 5], a: &[f64]| {
            w[0] * a[nb[0]] + w[1] * a[nb[1]] + w[2] * a[nb[2]] + w[3] * a[nb[3]] + w[4] * a[nb[4]]
        };
        Terms {
            v_hx: dot(&p.w, &u.hx),
            v_hy: dot(&p.w, &u.hy),
            v_ez: dot(&p.w, &u.ez),
            dx_ez: dot(&p.gx, &u.ez),
            dy_ez: dot(&p.gy, &u.ez),
            dx_hy: dot(&p.gx, &u.hy),
            dy_hx: dot(&p.gy, &u.hx),
        }
    }

    fn fitted_terms(&self, i: usize, j: usize, nb: &[usize; 5], u: &FieldState2) -> Terms {
        let rel = relative_stencil(&self.grid, i, j).expect("stencil validated at construction");
        let fit = |a: &[f64]| {
            let vals: Vec<f64> = nb.iter().map(|&q| a[q]).collect();
            lsq::fit_local_linear(&rel, &vals).expect("stencil validated at construction")
        };
        let (fx, fy, fz) = (fit(&u.hx), fit(&u.hy), fit(&u.ez));
        let k = nb[0];
        let theta = self.spec.kind == SchemeKind::LsTheta;
        Terms {
            v_hx: if theta { fx.a_hat } else { u.hx[k] },
            v_hy: if theta { fy.a_hat } else { u.hy[k] },
            v_ez: if theta { fz.a_hat } else { u.ez[k] },
            dx_ez: fz.b_hat,
            dy_ez: fz.c_hat,
            dx_hy: fy.b_hat,
            dy_hx: fx.c_hat,
        }
    }

    fn kernel(&self, u: &FieldState2, out: &mut FieldState2, s: f64, history: bool) {
        let ny = self.grid.ny();
        let FieldState2 { hx, hy, ez } = out;
        exec::rows3_mut(ny, hx, hy, ez, |i, rhx, rhy, rez| {
            for j in 0..ny {
                let k = i * ny + j;
                let Some(nb) = self.grid.stencil_indices(i, j) else {
                    rhx[j] = u.hx[k];
                    rhy[j] = u.hy[k];
                    rez[j] = u.ez[k];
                    continue;
                };
                let d = self.terms(i, j, &nb, u);
                let ie = s * self.inv_eps[k];
                let im = s * self.inv_mu[k];
                match &self.pml {
                    Some(p) if p.active[k] => {
                        let (ax, ay) = (1.0 + p.cx[k], 1.0 + p.cy[k]);
                        let mut fez = ax * d.dx_hy - ay * d.dy_hx;
                        let mut fhx = ay * d.dy_ez;
                        let mut fhy = ax * d.dx_ez;
                        if history {
                            fez += p.bx[k] * p.psi_ezx[k] - p.by[k] * p.psi_ezy[k];
                            fhx += p.by[k] * p.psi_hxy[k];
                            fhy += p.bx[k] * p.psi_hyx[k];
                        }
                        rez[j] = d.v_ez + ie * fez;
                        rhx[j] = d.v_hx - im * fhx;
                        rhy[j] = d.v_hy + im * fhy;
                    }
                    _ => {
                        rez[j] = d.v_ez + ie * (d.dx_hy - d.dy_hx);
                        rhx[j] = d.v_hx - im * d.dy_ez;
                        rhy[j] = d.v_hy + im * d.dx_ez;
                    }
                }
            }
        });
    }

    /// `Ψⁿ = b Ψⁿ⁻¹ + c ∂ⁿ` from the derivatives of `u`.
    fn advance_psi(&mut self, u: &FieldState2) {
        let Some(mut p) = self.pml.take() else { return };
        let ny = self.grid.ny();
        {
            let this = &*self;
            let PmlState { active, bx, by, cx, cy, psi_ezx, psi_ezy, psi_hxy, psi_hyx, .. } = &mut p;
            let (active, bx, by, cx, cy) = (&*active, &*bx, &*by, &*cx, &*cy);
            exec::rows4_mut(ny, psi_ezx, psi_ezy, psi_hxy, psi_hyx, |i, a, b, c, d| {
                for j in 0..ny {
                    let k = i * ny + j;
                    if !active[k] {
                        continue;
                    }
                    let Some(nb) = this.grid.stencil_indices(i, j) else { continue };
                    let t = this.terms(i, j, &nb, u);
                    a[j] = bx[k] * a[j] + cx[k] * t.dx_hy;
                    b[j] = by[k] * b[j] + cy[k] * t.dy_hx;
                    c[j] = by[k] * c[j] + cy[k] * t.dy_ez;
                    d[j] = bx[k] * d[j] + cx[k] * t.dx_ez;
                }
            });
        }
        self.pml = Some(p);
    }

    /// Additive TF/SF corrections for one application with signed step `s`
    /// whose input is at time `t`.
    pub fn tfsf_corrections(&self, t: f64, s: f64) -> FieldState2 {
        let mut out = FieldState2::zeros(self.grid.len());
        if let Some(tf) = &self.tfsf {
            self.add_tfsf(tf, &mut out, t, s);
        }
        out
    }

    fn add_tfsf(&self, tf: &Tfsf, out: &mut FieldState2, t: f64, s: f64) {
        let coords = self.grid.coords();
        for e in &tf.entries {
            let [ihx, ihy, iez] = tf.source.incident(coords[e.q], t);
            let ie = s * self.inv_eps[e.k];
            let im = s * self.inv_mu[e.k];
            out.ez[e.k] += e.sign * (e.w * iez + ie * (e.gx * ihy - e.gy * ihx));
            out.hx[e.k] += e.sign * (e.w * ihx - im * e.gy * iez);
            out.hy[e.k] += e.sign * (e.w * ihy + im * e.gx * iez);
        }
    }
}

/// Stencil offsets from the center point.
pub fn relative_stencil(grid: &Grid2, i: usize, j: usize) -> Result<Vec<Point>> {
    let pts = grid.stencil(i, j)?;
    let c = pts[0];
    Ok(pts.iter().map(|p| [p[0] - c[0], p[1] - c[1]]).collect())
}

impl Operator for Scheme2 {
    type State = FieldState2;

    fn dt(&self) -> f64 {
        self.spec.dt
    }

    fn apply(&mut self, input: &FieldState2, output: &mut FieldState2, pass: Pass, t: f64) -> Result<()> {
        let n = self.grid.len();
        for p in input.parts().into_iter().chain(output.parts()) {
            check_len(n, p.len())?;
        }
        let s = self.spec.pass_sign(pass) * self.spec.dt;
        let last = pass == Pass::Final;
        self.kernel(input, output, s, last);
        if last {
            self.advance_psi(input);
        }
        if let Some(tf) = &self.tfsf {
            if last || tf.placement == TfsfPlacement::EverySubstep {
                self.add_tfsf(tf, output, t, s);
            }
        }
        Ok(())
    }
}

/// One step of a 2D scheme in vacuum in the direction given by `spec`.
pub fn step_2d(spec: SchemeSpec, state: &FieldState2, grid: &Grid2) -> Result<FieldState2> {
    let mut op = Scheme2::new(spec, grid)?;
    let mut out = FieldState2::zeros(grid.len());
    op.apply(state, &mut out, Pass::Forward, 0.0)?;
    Ok(out)
}
