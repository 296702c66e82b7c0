//! Experiment definitions, refinement sweeps and the flat config format.
//!
//! Config files are `key = value` lines with dotted keys; `#` starts a
//! comment. `experiment` selects a preset and every other key overrides it.
//!
//! | key | meaning |
//! |---|---|
//! | `experiment` | `periodic1d`, `periodic2d`, `scatter_cylinder`, `scatter_complex` |
//! | `scheme` | `cd`, `lf`, `theta`, `ls_cd`, `ls_theta` |
//! | `theta` | blend for `theta` |
//! | `bfecc` | `true` for BFECC, `false` for the bare scheme |
//! | `ratio` | `Δt/Δx` (the last step is shortened so runs end exactly at `final_time`) |
//! | `sizes` | comma-separated dyadic grid sizes |
//! | `grid` | `a` uniform, `b` perturbed, `c` twisted, `d` point-shifted |
//! | `final_time` | end time |
//! | `seed` | recorded in outputs |
//! | `output` | directory for CSVs |
//! | `reference_size` | reference grid for scattering runs |
//! | `material.eps`, `material.mu`, `material.radius` | scatterer |
//! | `pml.cells`, `pml.sigma_max`, `pml.exponent` | absorbing collar |
//! | `tfsf.rect`, `tfsf.omega`, `tfsf.amplitude`, `tfsf.placement` | plane-wave source |
//! | `allow_unstable` | skip the CFL check |
//! | `norm` | `rms`, `component_sum`, `component:<c>`, `unnormalized` |
//! | `lsq` | `cached` or `recompute` |

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::cfl_bound;
use crate::bfecc::{integrate, Bfecc, Stepping};
use crate::diagnostics::{self, attach_orders, ErrorReport, NormConvention};
use crate::error::{Error, Result};
use crate::exec;
use crate::grid::{point_shift, Boundary, Circle, Curve, Grid2, Point, Rect, StarCurve};
use crate::pml::{PmlConfig, TfsfPlacement, TfsfSource};
use crate::schemes::{FieldState1, FieldState2, LsqMode, Media, Scheme1, Scheme2, SchemeKind, SchemeSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Periodic1d,
    Periodic2d,
    ScatterCylinder,
    ScatterComplex,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Periodic1d => "periodic1d",
            Experiment::Periodic2d => "periodic2d",
            Experiment::ScatterCylinder => "scatter_cylinder",
            Experiment::ScatterComplex => "scatter_complex",
        }
    }

    pub fn is_scattering(self) -> bool {
        matches!(self, Experiment::ScatterCylinder | Experiment::ScatterComplex)
    }
}

impl std::str::FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Experiment::Periodic1d, Experiment::Periodic2d, Experiment::ScatterCylinder, Experiment::ScatterComplex]
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridVariant {
    /// Uniform rectangular.
    A,
    /// Smooth sinusoidal perturbation.
    B,
    /// Area-preserving twist about the center.
    C,
    /// Point-shifted onto a circle.
    D,
}

impl GridVariant {
    pub fn label(self) -> &'static str {
        match self {
            GridVariant::A => "a",
            GridVariant::B => "b",
            GridVariant::C => "c",
            GridVariant::D => "d",
        }
    }
}

impl std::str::FromStr for GridVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(GridVariant::A),
            "b" => Ok(GridVariant::B),
            "c" => Ok(GridVariant::C),
            "d" => Ok(GridVariant::D),
            _ => Err(Error::Config(format!("unknown grid variant {s:?}"))),
        }
    }
}

/// Amplitude of the grid (b) perturbation.
pub const PERTURB_AMPLITUDE: f64 = 0.05;
/// Peak rotation angle and radius of the grid (c) twist.
pub const TWIST_ANGLE: f64 = 0.4;
pub const TWIST_RADIUS: f64 = 0.4;
/// Circle used by grid (d) and the cylinder.
pub const CIRCLE_CENTER: Point = [0.5, 0.5];
pub const CIRCLE_RADIUS: f64 = 0.24;

/// Grid (b): `x̃ = x + a sin 2πx sin 2πy`, `ỹ = y + a sin 2πx sin 2πy`.
pub fn perturbation_b(p: Point) -> Point {
    let b = PERTURB_AMPLITUDE * (2.0 * PI * p[0]).sin() * (2.0 * PI * p[1]).sin();
    [p[0] + b, p[1] + b]
}

/// Grid (c): rotation about the center by `β cos²(πr / 2R)` inside radius `R`.
pub fn twist_c(p: Point) -> Point {
    let (dx, dy) = (p[0] - CIRCLE_CENTER[0], p[1] - CIRCLE_CENTER[1]);
    let r = dx.hypot(dy);
    if r >= TWIST_RADIUS {
        return p;
    }
    let a = TWIST_ANGLE * (0.5 * PI * r / TWIST_RADIUS).cos().powi(2);
    let (s, c) = a.sin_cos();
    [CIRCLE_CENTER[0] + c * dx - s * dy, CIRCLE_CENTER[1] + s * dx + c * dy]
}

/// The four periodic test grids on the unit square.
pub fn grid_variants(kind: GridVariant, n: usize) -> Result<Grid2> {
    let g = Grid2::uniform(n, n, Rect::UNIT, Boundary::Periodic)?;
    Ok(match kind {
        GridVariant::A => g,
        GridVariant::B => g.deformed_by(perturbation_b),
        GridVariant::C => g.deformed_by(twist_c),
        GridVariant::D => point_shift(&g, &Circle::new(CIRCLE_CENTER, CIRCLE_RADIUS)),
    })
}

/// Bounded grid covering the unit square with `cells` extra rings of PML
/// on every side; physical index `i` sits at grid index `i + cells`.
pub fn collar_grid(n: usize, cells: usize) -> Result<Grid2> {
    let h = 1.0 / n as f64;
    let pad = cells as f64 * h;
    let m = n + 1 + 2 * cells;
    Grid2::uniform(m, m, Rect::new(-pad, -pad, 1.0 + pad, 1.0 + pad), Boundary::Bounded)
}

/// Step count and step size landing exactly on `t_final` with
/// `Δt ≤ ratio · h`.
pub fn time_steps(t_final: f64, ratio: f64, h: f64) -> (usize, f64) {
    let steps = (t_final / (ratio * h) - 1e-9).ceil().max(1.0) as usize;
    (steps, t_final / steps as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaterialConfig {
    pub eps: f64,
    pub mu: f64,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TfsfConfig {
    pub rect: Rect,
    pub omega: f64,
    pub amplitude: f64,
    pub placement: TfsfPlacement,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub scheme: SchemeKind,
    pub theta: f64,
    pub bfecc: bool,
    pub ratio: f64,
    pub sizes: Vec<usize>,
    pub grid: GridVariant,
    pub final_time: f64,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub reference_size: usize,
    pub material: MaterialConfig,
    pub pml: PmlConfig,
    pub tfsf: TfsfConfig,
    pub allow_unstable: bool,
    pub norm: NormConvention,
    pub lsq: LsqMode,
}

impl ExperimentConfig {
    pub fn preset(experiment: Experiment) -> Self {
        let base = ExperimentConfig {
            experiment,
            scheme: SchemeKind::LsTheta,
            theta: 0.5,
            bfecc: true,
            ratio: 0.25,
            sizes: vec![20, 40, 80],
            grid: GridVariant::A,
            final_time: 2.5,
            seed: 42,
            output: None,
            reference_size: 160,
            material: MaterialConfig { eps: 2.25, mu: 1.0, radius: CIRCLE_RADIUS },
            pml: PmlConfig::default(),
            tfsf: TfsfConfig {
                rect: Rect::new(0.1, 0.1, 0.9, 0.9),
                omega: 2.0 * PI / 0.6,
                amplitude: 1.0,
                placement: TfsfPlacement::EverySubstep,
            },
            allow_unstable: false,
            norm: NormConvention::Rms,
            lsq: LsqMode::Cached,
        };
        match experiment {
            Experiment::Periodic1d => ExperimentConfig {
                scheme: SchemeKind::Cd,
                ratio: 0.38,
                sizes: vec![64, 128, 256, 512, 1024, 2048],
                final_time: 0.6,
                norm: NormConvention::ComponentSum,
                ..base
            },
            Experiment::Periodic2d => ExperimentConfig { norm: NormConvention::Component(2), ..base },
            Experiment::ScatterCylinder => {
                ExperimentConfig { ratio: 1.0, grid: GridVariant::D, final_time: 3.8, ..base }
            }
            Experiment::ScatterComplex => {
                ExperimentConfig { ratio: 1.0, grid: GridVariant::D, final_time: 3.6, ..base }
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut kv: Vec<(usize, String, String)> = Vec::new();
        let mut seen = HashMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", ln + 1)))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if seen.insert(k.clone(), ln).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key {k}", ln + 1)));
            }
            kv.push((ln + 1, k, v));
        }
        let exp = kv
            .iter()
            .find(|(_, k, _)| k == "experiment")
            .ok_or_else(|| Error::Config("missing key experiment".into()))?
            .2
            .parse()?;
        let mut cfg = ExperimentConfig::preset(exp);
        for (ln, k, v) in &kv {
            cfg.set(k, v).map_err(|e| Error::Config(format!("line {ln}: {k}: {}", strip_prefix(e))))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        ExperimentConfig::parse(&fs::read_to_string(path)?)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "experiment" => {}
            "scheme" => self.scheme = v.parse()?,
            "theta" => self.theta = num(v)?,
            "bfecc" => self.bfecc = boolean(v)?,
            "ratio" => self.ratio = num(v)?,
            "sizes" => {
                self.sizes = v
                    .split(',')
                    .map(|s| s.trim().parse::<usize>().map_err(|e| Error::Config(e.to_string())))
                    .collect::<Result<_>>()?
            }
            "grid" => self.grid = v.parse()?,
            "final_time" => self.final_time = num(v)?,
            "seed" => self.seed = v.parse().map_err(|_| Error::Config(format!("bad integer {v:?}")))?,
            "output" => self.output = Some(PathBuf::from(v)),
            "reference_size" => {
                self.reference_size = v.parse().map_err(|_| Error::Config(format!("bad integer {v:?}")))?
            }
            "material.eps" => self.material.eps = num(v)?,
            "material.mu" => self.material.mu = num(v)?,
            "material.radius" => self.material.radius = num(v)?,
            "pml.cells" => self.pml.cells = v.parse().map_err(|_| Error::Config(format!("bad integer {v:?}")))?,
            "pml.sigma_max" => self.pml.sigma_max = num(v)?,
            "pml.exponent" => self.pml.exponent = num(v)?,
            "tfsf.rect" => {
                let r: Vec<f64> = v.split(',').map(|s| num(s.trim())).collect::<Result<_>>()?;
                if r.len() != 4 {
                    return Err(Error::Config("tfsf.rect needs x0,y0,x1,y1".into()));
                }
                self.tfsf.rect = Rect::new(r[0], r[1], r[2], r[3]);
            }
            "tfsf.omega" => self.tfsf.omega = num(v)?,
            "tfsf.amplitude" => self.tfsf.amplitude = num(v)?,
            "tfsf.placement" => {
                self.tfsf.placement = match v {
                    "every" => TfsfPlacement::EverySubstep,
                    "final" => TfsfPlacement::FinalSubstep,
                    _ => return Err(Error::Config(format!("unknown placement {v:?}"))),
                }
            }
            "allow_unstable" => self.allow_unstable = boolean(v)?,
            "norm" => self.norm = v.parse()?,
            "lsq" => {
                self.lsq = match v {
                    "cached" => LsqMode::Cached,
                    "recompute" => LsqMode::Recompute,
                    _ => return Err(Error::Config(format!("unknown lsq mode {v:?}"))),
                }
            }
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::Config("sizes is empty".into()));
        }
        if self.sizes.windows(2).any(|w| w[1] != 2 * w[0]) {
            return Err(Error::Config(format!("sizes {:?} are not dyadic", self.sizes)));
        }
        if !(self.final_time > 0.0) {
            return Err(Error::Config(format!("final_time must be positive, got {}", self.final_time)));
        }
        if !(self.ratio > 0.0) {
            return Err(Error::Config(format!("ratio must be positive, got {}", self.ratio)));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::Config(format!("theta must lie in [0, 1], got {}", self.theta)));
        }
        match self.experiment {
            Experiment::Periodic1d if self.scheme.is_least_squares() => {
                return Err(Error::Config("least-squares schemes are two-dimensional".into()));
            }
            Experiment::Periodic2d if !self.scheme.is_least_squares() && self.grid != GridVariant::A => {
                return Err(Error::Config(format!("{} needs grid a", self.scheme)));
            }
            e if e.is_scattering() => {
                if !self.scheme.is_least_squares() && self.grid != GridVariant::A {
                    return Err(Error::Config(format!("{} needs grid a", self.scheme)));
                }
                if !matches!(self.grid, GridVariant::A | GridVariant::D) {
                    return Err(Error::Config("scattering runs use grid a or d".into()));
                }
                let top = *self.sizes.last().expect("nonempty");
                if self.reference_size <= top || !self.reference_size.is_multiple_of(top) || !(self.reference_size / top).is_power_of_two() {
                    return Err(Error::Config(format!(
                        "reference_size {} must be a dyadic multiple of {top}",
                        self.reference_size
                    )));
                }
                if !(self.material.eps > 0.0 && self.material.mu > 0.0 && self.material.radius > 0.0) {
                    return Err(Error::Config("material parameters must be positive".into()));
                }
                self.pml.validate()?;
            }
            _ => {}
        }
        if self.lsq == LsqMode::Recompute && !self.scheme.is_least_squares() {
            return Err(Error::Config(format!("{} does not use least-squares fits", self.scheme)));
        }
        Ok(())
    }

    fn spec(&self, dt: f64) -> SchemeSpec {
        SchemeSpec::new(self.scheme, dt).with_theta(self.theta)
    }

    /// Refuse time steps beyond the proven bound unless allowed.
    pub fn check_cfl(&self, dt: f64, spacings: &[f64]) -> Result<()> {
        if self.allow_unstable {
            return Ok(());
        }
        let kind = match self.scheme {
            SchemeKind::LsCd | SchemeKind::LsTheta => SchemeKind::Cd,
            k => k,
        };
        let bound = cfl_bound(kind, self.theta, spacings)?;
        if dt > bound * (1.0 + 1e-12) {
            return Err(Error::CflViolation { dt, bound });
        }
        Ok(())
    }

    fn stepping(&self) -> Stepping {
        if self.bfecc {
            Stepping::Bfecc
        } else {
            Stepping::Plain
        }
    }
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::Config(s) => s,
        other => other.to_string(),
    }
}

fn num(v: &str) -> Result<f64> {
    v.parse().map_err(|_| Error::Config(format!("bad number {v:?}")))
}

fn boolean(v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("bad boolean {v:?}"))),
    }
}

/// Check for blow-up this often (in steps).
const CHECK_EVERY: usize = 10;

/// 1D periodic run from `E = H = sin 2πx` against `sin 2π(x + t)`.
#[derive(Clone, Debug)]
pub struct Run1d {
    pub n: usize,
    pub steps: usize,
    pub dt: f64,
    pub state: FieldState1,
    pub exact: FieldState1,
}

pub fn run_periodic1d(cfg: &ExperimentConfig, n: usize) -> Result<Run1d> {
    let h = 1.0 / n as f64;
    let (steps, dt) = time_steps(cfg.final_time, cfg.ratio, h);
    cfg.check_cfl(dt, &[h])?;
    let xs: Vec<f64> = (0..n).map(|j| j as f64 * h).collect();
    let wave = |t: f64| {
        let v: Vec<f64> = xs.iter().map(|x| (2.0 * PI * (x + t)).sin()).collect();
        FieldState1 { e: v.clone(), h: v }
    };
    let mut u = wave(0.0);
    let mut stepper = Bfecc::new(Scheme1::new(cfg.spec(dt), h, n)?);
    let t = integrate(&mut stepper, &mut u, 0.0, steps, cfg.stepping(), CHECK_EVERY)?;
    Ok(Run1d { n, steps, dt, state: u, exact: wave(t) })
}

/// 2D periodic plane wave `Ez = sin 2π(x − t)`, `Hy = −Ez`, `Hx = 0`.
pub fn plane_wave_2d(p: Point, t: f64) -> [f64; 3] {
    let ez = (2.0 * PI * (p[0] - t)).sin();
    [0.0, -ez, ez]
}

#[derive(Clone, Debug)]
pub struct Run2d {
    pub n: usize,
    pub steps: usize,
    pub dt: f64,
    pub grid: Grid2,
    pub state: FieldState2,
    /// Exact solution (periodic runs) at the final time.
    pub exact: Option<FieldState2>,
}

pub fn run_periodic2d(cfg: &ExperimentConfig, n: usize) -> Result<Run2d> {
    let grid = grid_variants(cfg.grid, n)?;
    let h = 1.0 / n as f64;
    let (steps, dt) = time_steps(cfg.final_time, cfg.ratio, h);
    cfg.check_cfl(dt, &[h, h])?;
    let mut u = FieldState2::sample(&grid, |p| plane_wave_2d(p, 0.0));
    let op = Scheme2::new(cfg.spec(dt), &grid)?.with_lsq_mode(cfg.lsq)?;
    let mut stepper = Bfecc::new(op);
    let t = integrate(&mut stepper, &mut u, 0.0, steps, cfg.stepping(), CHECK_EVERY)?;
    let exact = FieldState2::sample(&grid, |p| plane_wave_2d(p, t));
    Ok(Run2d { n, steps, dt, grid, state: u, exact: Some(exact) })
}

/// The scatterer outline of a scattering experiment.
pub fn scatterer(cfg: &ExperimentConfig) -> Box<dyn Curve> {
    match cfg.experiment {
        Experiment::ScatterComplex => Box::new(StarCurve {
            base_radius: cfg.material.radius,
            ..StarCurve::standard()
        }),
        _ => Box::new(Circle::new(CIRCLE_CENTER, cfg.material.radius)),
    }
}

/// Collar grid (point-shifted for variant `d`) and sampled media.
pub fn scatter_setup(cfg: &ExperimentConfig, n: usize) -> Result<(Grid2, Media)> {
    let rect = collar_grid(n, cfg.pml.cells)?;
    let curve = scatterer(cfg);
    let grid = match cfg.grid {
        GridVariant::D => point_shift(&rect, curve.as_ref()),
        _ => rect,
    };
    let (eps, mu) = (cfg.material.eps, cfg.material.mu);
    let mask = grid.shifted_mask();
    let media = Media {
        eps: grid
            .coords()
            .iter()
            .zip(mask)
            .map(|(p, s)| if *s || curve.contains(*p) { eps } else { 1.0 })
            .collect(),
        mu: grid
            .coords()
            .iter()
            .zip(mask)
            .map(|(p, s)| if *s || curve.contains(*p) { mu } else { 1.0 })
            .collect(),
    };
    Ok((grid, media))
}

/// Scattering run from zero fields to `t_final`.
pub fn run_scatter(cfg: &ExperimentConfig, n: usize, t_final: f64) -> Result<Run2d> {
    let (grid, media) = scatter_setup(cfg, n)?;
    let h = 1.0 / n as f64;
    let (steps, dt) = time_steps(t_final, cfg.ratio, h);
    cfg.check_cfl(dt, &[h, h])?;
    let src = TfsfSource::plane_wave(cfg.tfsf.rect, cfg.tfsf.omega, cfg.tfsf.amplitude);
    let op = Scheme2::new(cfg.spec(dt), &grid)?
        .with_media(&media)?
        .with_lsq_mode(cfg.lsq)?
        .with_pml(&cfg.pml)?
        .with_tfsf(src, cfg.tfsf.placement)?;
    let mut u = FieldState2::zeros(grid.len());
    let mut stepper = Bfecc::new(op);
    integrate(&mut stepper, &mut u, 0.0, steps, cfg.stepping(), CHECK_EVERY)?;
    Ok(Run2d { n, steps, dt, grid, state: u, exact: None })
}

/// Points of a collar grid that lie in the physical unit square.
pub fn physical_part(state: &FieldState2, grid: &Grid2, cells: usize) -> FieldState2 {
    let lo = cells;
    let hi = grid.nx() - 1 - cells;
    let mut out = FieldState2 { hx: Vec::new(), hy: Vec::new(), ez: Vec::new() };
    for i in lo..=hi {
        for j in lo..=(grid.ny() - 1 - cells) {
            let k = grid.idx(i, j);
            out.hx.push(state.hx[k]);
            out.hy.push(state.hy[k]);
            out.ez.push(state.ez[k]);
        }
    }
    debug_assert_eq!(hi - lo, grid.ny() - 1 - 2 * cells);
    out
}

/// Error of a coarse scattering run against a finer reference run, over the
/// physical region.
pub fn reference_error(
    coarse: &Run2d,
    reference: &Run2d,
    cells: usize,
    norm: NormConvention,
) -> Result<(f64, Vec<f64>)> {
    let a = physical_part(&coarse.state, &coarse.grid, cells);
    let b = physical_part(&reference.state, &reference.grid, cells);
    let (na, nb) = (coarse.grid.nx() - 2 * cells, reference.grid.nx() - 2 * cells);
    if na < 2 || (nb - 1) % (na - 1) != 0 {
        return Err(Error::InvalidParameter(format!(
            "reference size {} is not a refinement of {}",
            reference.n, coarse.n
        )));
    }
    let r = (nb - 1) / (na - 1);
    let mut restricted = FieldState2::zeros(a.len());
    for i in 0..na {
        for j in 0..na {
            let (kc, kf) = (i * na + j, r * i * nb + r * j);
            restricted.hx[kc] = b.hx[kf];
            restricted.hy[kc] = b.hy[kf];
            restricted.ez[kc] = b.ez[kf];
        }
    }
    Ok((diagnostics::l2_error_with(&a, &restricted, norm)?, diagnostics::component_rms(&a, &restricted)?))
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub n: usize,
    pub grid: Grid2,
    pub state: FieldState2,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub reports: Vec<ErrorReport>,
    /// Per-component RMS errors for each size.
    pub components: Vec<Vec<f64>>,
    pub snapshots: Vec<Snapshot>,
}

fn label(cfg: &ExperimentConfig) -> String {
    match cfg.experiment {
        Experiment::Periodic1d => format!("{}_r{}", cfg.scheme, cfg.ratio),
        _ => format!("{}_{}", cfg.scheme, cfg.grid.label()),
    }
}

/// Run every size of the sweep (concurrently) and collect error reports.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let name = label(cfg);
    let mut reports = Vec::new();
    let mut components = Vec::new();
    let mut snapshots = Vec::new();
    match cfg.experiment {
        Experiment::Periodic1d => {
            let runs: Vec<Result<Run1d>> = exec::map_range(cfg.sizes.len(), |s| run_periodic1d(cfg, cfg.sizes[s]));
            for r in runs {
                let r = r?;
                reports.push(ErrorReport {
                    label: name.clone(),
                    n: r.n,
                    h: 1.0 / r.n as f64,
                    dt: r.dt,
                    l2_error: diagnostics::l2_error_with(&r.state, &r.exact, cfg.norm)?,
                    order: None,
                });
                components.push(diagnostics::component_rms(&r.state, &r.exact)?);
            }
        }
        Experiment::Periodic2d => {
            let runs: Vec<Result<Run2d>> = exec::map_range(cfg.sizes.len(), |s| run_periodic2d(cfg, cfg.sizes[s]));
            for r in runs {
                let r = r?;
                let exact = r.exact.as_ref().expect("periodic runs carry the exact solution");
                reports.push(ErrorReport {
                    label: name.clone(),
                    n: r.n,
                    h: 1.0 / r.n as f64,
                    dt: r.dt,
                    l2_error: diagnostics::l2_error_with(&r.state, exact, cfg.norm)?,
                    order: None,
                });
                components.push(diagnostics::component_rms(&r.state, exact)?);
                snapshots.push(Snapshot { n: r.n, grid: r.grid, state: r.state });
            }
        }
        Experiment::ScatterCylinder | Experiment::ScatterComplex => {
            let mut all = cfg.sizes.clone();
            all.push(cfg.reference_size);
            let mut runs = exec::map_range(all.len(), |s| run_scatter(cfg, all[s], cfg.final_time))
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            let reference = runs.pop().expect("reference run");
            for r in runs {
                let (err, comps) = reference_error(&r, &reference, cfg.pml.cells, cfg.norm)?;
                reports.push(ErrorReport {
                    label: name.clone(),
                    n: r.n,
                    h: 1.0 / r.n as f64,
                    dt: r.dt,
                    l2_error: err,
                    order: None,
                });
                components.push(comps);
                snapshots.push(Snapshot { n: r.n, grid: r.grid, state: r.state });
            }
        }
    }
    attach_orders(&mut reports);
    Ok(RunOutput { reports, components, snapshots })
}

/// Write `errors.csv` and one `snapshot_<n>.csv` per 2D size into `dir`.
pub fn write_outputs(out: &RunOutput, dir: &Path, with_snapshots: bool) -> Result<()> {
    fs::create_dir_all(dir)?;
    let f = fs::File::create(dir.join("errors.csv"))?;
    diagnostics::write_error_csv(&out.reports, std::io::BufWriter::new(f))?;
    if with_snapshots {
        for s in &out.snapshots {
            let f = fs::File::create(dir.join(format!("snapshot_{}.csv", s.n)))?;
            diagnostics::write_snapshot(&s.grid, &s.state, std::io::BufWriter::new(f))?;
        }
    }
    Ok(())
}
