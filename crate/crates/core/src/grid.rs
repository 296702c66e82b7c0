//! Logically rectangular grids and the point-shifted deformation.
//!
//! A [`Grid2`] keeps the index topology of a uniform `nx x ny` lattice while
//! allowing individual point coordinates to move. The point-shift algorithm
//! relocates the lattice point nearest to each curve/grid-line intersection
//! onto the curve; everything downstream (least-squares stencils, schemes)
//! only sees the coordinates, so no topology changes are ever needed.

use std::io::Write;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Offsets of the 5-point stencil: center, west, east, south, north.
pub const STENCIL_OFFSETS: [(isize, isize); 5] = [(0, 0), (-1, 0), (1, 0), (0, -1), (0, 1)];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Bounded,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub const UNIT: Rect = Rect { x0: 0.0, y0: 0.0, x1: 1.0, y1: 1.0 };

    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    /// Closed containment test.
    pub fn contains(&self, p: Point) -> bool {
        self.contains_within(p, 0.0)
    }

    /// Containment in the rectangle grown by `tol` on every side.
    pub fn contains_within(&self, p: Point, tol: f64) -> bool {
        p[0] >= self.x0 - tol && p[0] <= self.x1 + tol && p[1] >= self.y0 - tol && p[1] <= self.y1 + tol
    }
}

#[derive(Clone, Debug)]
pub struct Grid2 {
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    domain: Rect,
    boundary: Boundary,
    coords: Vec<Point>,
    shifted: Vec<bool>,
    deformed: bool,
}

impl Grid2 {
    /// Uniform grid over `domain`. Periodic grids exclude the right/top edge
    /// (`dx = width / nx`), bounded grids include it (`dx = width / (nx - 1)`).
    pub fn uniform(nx: usize, ny: usize, domain: Rect, boundary: Boundary) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::TooFewPoints { nx, ny });
        }
        if !(domain.width() > 0.0) || !(domain.height() > 0.0) {
            return Err(Error::DegenerateDomain(format!(
                "width {} height {}",
                domain.width(),
                domain.height()
            )));
        }
        let (dx, dy) = match boundary {
            Boundary::Periodic => (domain.width() / nx as f64, domain.height() / ny as f64),
            Boundary::Bounded => (
                domain.width() / (nx - 1) as f64,
                domain.height() / (ny - 1) as f64,
            ),
        };
        let mut coords = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            for j in 0..ny {
                coords.push([domain.x0 + i as f64 * dx, domain.y0 + j as f64 * dy]);
            }
        }
        Ok(Grid2 {
            nx,
            ny,
            dx,
            dy,
            domain,
            boundary,
            coords,
            shifted: vec![false; nx * ny],
            deformed: false,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Row-major flat index; rows are constant `i`.
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> Point {
        self.coords[self.idx(i, j)]
    }

    pub fn coords(&self) -> &[Point] {
        &self.coords
    }

    pub fn shifted_mask(&self) -> &[bool] {
        &self.shifted
    }

    pub fn is_shifted(&self, i: usize, j: usize) -> bool {
        self.shifted[self.idx(i, j)]
    }

    /// Position of `(i, j)` on the underlying rectangular lattice.
    #[inline]
    pub fn rect_point(&self, i: usize, j: usize) -> Point {
        [
            self.domain.x0 + i as f64 * self.dx,
            self.domain.y0 + j as f64 * self.dy,
        ]
    }

    /// True when every coordinate is still the rectangular lattice position.
    pub fn is_uniform(&self) -> bool {
        !self.deformed
    }

    /// Periods used to unwrap neighbors across a periodic seam.
    pub fn period(&self) -> (f64, f64) {
        (self.domain.width(), self.domain.height())
    }

    pub fn is_boundary_index(&self, i: usize, j: usize) -> bool {
        self.boundary == Boundary::Bounded
            && (i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny)
    }

    /// Flat indices of the 5-point stencil in [`STENCIL_OFFSETS`] order,
    /// or `None` at the edge of a bounded grid.
    #[inline]
    pub fn stencil_indices(&self, i: usize, j: usize) -> Option<[usize; 5]> {
        if self.is_boundary_index(i, j) {
            return None;
        }
        let (nx, ny) = (self.nx, self.ny);
        let im = if i == 0 { nx - 1 } else { i - 1 };
        let ip = if i + 1 == nx { 0 } else { i + 1 };
        let jm = if j == 0 { ny - 1 } else { j - 1 };
        let jp = if j + 1 == ny { 0 } else { j + 1 };
        Some([
            self.idx(i, j),
            self.idx(im, j),
            self.idx(ip, j),
            self.idx(i, jm),
            self.idx(i, jp),
        ])
    }

    /// Stencil point coordinates with periodic images unwrapped so the
    /// stencil is geometrically local.
    pub fn stencil(&self, i: usize, j: usize) -> Result<[Point; 5]> {
        if i >= self.nx || j >= self.ny {
            return Err(Error::IndexOutOfRange { i, j, nx: self.nx, ny: self.ny });
        }
        if self.is_boundary_index(i, j) {
            return Err(Error::BoundaryStencil { i, j });
        }
        let (lx, ly) = self.period();
        let mut out = [[0.0; 2]; 5];
        for (slot, &(di, dj)) in STENCIL_OFFSETS.iter().enumerate() {
            let ii = i as isize + di;
            let jj = j as isize + dj;
            let (wi, sx) = wrap(ii, self.nx, lx);
            let (wj, sy) = wrap(jj, self.ny, ly);
            let p = self.point(wi, wj);
            out[slot] = [p[0] + sx, p[1] + sy];
        }
        Ok(out)
    }

    /// Move every point through `map`. Shift flags are kept.
    pub fn deformed_by<F: Fn(Point) -> Point>(&self, map: F) -> Grid2 {
        let mut g = self.clone();
        for p in g.coords.iter_mut() {
            *p = map(*p);
        }
        g.deformed = true;
        g
    }

    /// Grid dump: `i,j,x,y,shifted` per line, row-major, 17 significant digits.
    pub fn write_dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for i in 0..self.nx {
            for j in 0..self.ny {
                let p = self.point(i, j);
                writeln!(
                    w,
                    "{},{},{:.16e},{:.16e},{}",
                    i,
                    j,
                    p[0],
                    p[1],
                    u8::from(self.is_shifted(i, j))
                )?;
            }
        }
        Ok(())
    }

    fn nearest_lattice_index(&self, p: Point) -> (usize, usize) {
        let i = nearest_index((p[0] - self.domain.x0) / self.dx, self.nx, self.boundary);
        let j = nearest_index((p[1] - self.domain.y0) / self.dy, self.ny, self.boundary);
        (i, j)
    }
}

fn wrap(k: isize, n: usize, period: f64) -> (usize, f64) {
    if k < 0 {
        ((k + n as isize) as usize, -period)
    } else if k as usize >= n {
        (k as usize - n, period)
    } else {
        (k as usize, 0.0)
    }
}

/// Round a fractional lattice coordinate; exact halves go to the smaller index.
fn nearest_index(s: f64, n: usize, boundary: Boundary) -> usize {
    let fl = s.floor();
    let k = if s - fl > 0.5 { fl + 1.0 } else { fl };
    match boundary {
        Boundary::Periodic => (k as isize).rem_euclid(n as isize) as usize,
        Boundary::Bounded => k.clamp(0.0, (n - 1) as f64) as usize,
    }
}

/// A closed curve given by a level function, negative inside.
pub trait Curve: Sync {
    fn level(&self, p: Point) -> f64;

    /// Closed inside test; points on the curve count as inside.
    fn contains(&self, p: Point) -> bool {
        self.level(p) <= 0.0
    }

    /// Roots of the level function on the half-open segment `[a, b)`,
    /// ordered from `a` to `b`.
    fn segment_roots(&self, a: Point, b: Point, tol: f64) -> Vec<Point> {
        bisection_roots(|p| self.level(p), a, b, tol)
    }
}

/// Sub-intervals per segment used to bracket sign changes.
const BRACKETS_PER_SEGMENT: usize = 16;

fn bisection_roots<F: Fn(Point) -> f64>(phi: F, a: Point, b: Point, tol: f64) -> Vec<Point> {
    let at = |t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
    let mut roots = Vec::new();
    let mut t0 = 0.0;
    let mut f0 = phi(a);
    for k in 1..=BRACKETS_PER_SEGMENT {
        let t1 = k as f64 / BRACKETS_PER_SEGMENT as f64;
        let f1 = phi(at(t1));
        if f0 == 0.0 {
            roots.push(at(t0));
        } else if f0 * f1 < 0.0 {
            let (mut lo, mut hi, mut flo) = (t0, t1, f0);
            while (hi - lo) * len > tol {
                let mid = 0.5 * (lo + hi);
                let fm = phi(at(mid));
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if flo * fm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            let (pl, ph) = (at(lo), at(hi));
            roots.push(if phi(pl).abs() <= phi(ph).abs() { pl } else { ph });
        }
        t0 = t1;
        f0 = f1;
    }
    roots
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point, radius: f64) -> Self {
        Circle { center, radius }
    }
}

impl Curve for Circle {
    fn level(&self, p: Point) -> f64 {
        (p[0] - self.center[0]).hypot(p[1] - self.center[1]) - self.radius
    }

    fn segment_roots(&self, a: Point, b: Point, tol: f64) -> Vec<Point> {
        // Grid segments are axis aligned; solve the circle equation on the line.
        let (axis, other) = if a[0] == b[0] {
            (0, 1)
        } else if a[1] == b[1] {
            (1, 0)
        } else {
            return bisection_roots(|p| self.level(p), a, b, tol);
        };
        let offset = a[axis] - self.center[axis];
        let disc = self.radius * self.radius - offset * offset;
        if disc < 0.0 {
            return Vec::new();
        }
        let half = disc.sqrt();
        let (lo, hi) = if a[other] <= b[other] {
            (a[other], b[other])
        } else {
            (b[other], a[other])
        };
        let mut cands = vec![self.center[other] - half];
        if half > 0.0 {
            cands.push(self.center[other] + half);
        }
        if a[other] > b[other] {
            cands.reverse();
        }
        cands
            .into_iter()
            .filter(|&s| {
                if a[other] <= b[other] {
                    s >= lo && s < hi
                } else {
                    s > lo && s <= hi
                }
            })
            .map(|s| {
                let mut p = a;
                p[other] = s;
                p
            })
            .collect()
    }
}

/// Star-shaped curve `r(t) = r0 (1 + amplitude cos(lobes t))` about `center`.
///
/// Stand-in for the undisclosed "complicated" scatterer; the level function
/// is `|p - c| - r(angle)`, which has the right zero set but is not a
/// distance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StarCurve {
    pub center: Point,
    pub base_radius: f64,
    pub amplitude: f64,
    pub lobes: u32,
}

impl StarCurve {
    pub fn standard() -> Self {
        StarCurve { center: [0.5, 0.5], base_radius: 0.24, amplitude: 0.25, lobes: 5 }
    }
}

impl Curve for StarCurve {
    fn level(&self, p: Point) -> f64 {
        let (x, y) = (p[0] - self.center[0], p[1] - self.center[1]);
        let angle = y.atan2(x);
        x.hypot(y) - self.base_radius * (1.0 + self.amplitude * (self.lobes as f64 * angle).cos())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridLine {
    /// The vertical line `x = x_i`.
    X(usize),
    /// The horizontal line `y = y_j`.
    Y(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Intersection {
    pub point: Point,
    pub line: GridLine,
}

/// All crossings of `curve` with the lattice lines of `grid` (rectangular
/// positions), vertical lines first, each line scanned in increasing
/// coordinate. Seam segments of periodic grids are not scanned.
pub fn curve_grid_intersections(grid: &Grid2, curve: &dyn Curve) -> Vec<Intersection> {
    let tol = 1e-14 * grid.dx().min(grid.dy());
    let mut out: Vec<Intersection> = Vec::new();
    for i in 0..grid.nx() {
        for j in 0..grid.ny() - 1 {
            let (a, b) = (grid.rect_point(i, j), grid.rect_point(i, j + 1));
            for p in curve.segment_roots(a, b, tol) {
                out.push(Intersection { point: p, line: GridLine::X(i) });
            }
        }
    }
    for j in 0..grid.ny() {
        for i in 0..grid.nx() - 1 {
            let (a, b) = (grid.rect_point(i, j), grid.rect_point(i + 1, j));
            for p in curve.segment_roots(a, b, tol) {
                // A root exactly at a lattice point was already reported by
                // the vertical line through it.
                let dup = out.iter().any(|q| q.point == p);
                if !dup {
                    out.push(Intersection { point: p, line: GridLine::Y(j) });
                }
            }
        }
    }
    out
}

/// Relocate the lattice point nearest to each intersection onto it.
/// Intersections are processed in order, so a later one wins when two share
/// a nearest point.
pub fn point_shift(grid: &Grid2, curve: &dyn Curve) -> Grid2 {
    let mut out = grid.clone();
    let hits = curve_grid_intersections(grid, curve);
    for hit in &hits {
        let (i, j) = grid.nearest_lattice_index(hit.point);
        let k = out.idx(i, j);
        out.coords[k] = hit.point;
        out.shifted[k] = true;
    }
    if !hits.is_empty() {
        out.deformed = true;
    }
    out
}

/// Spread the point-shift deformation to unshifted neighbors.
///
/// Each pass replaces every zero displacement by the average of its four
/// neighbors' displacements; nonzero displacements (including every point on
/// the curve) are left alone. Bounded-grid edge points are never moved.
pub fn smooth_shift(shifted: &Grid2, rect: &Grid2, iterations: usize) -> Grid2 {
    assert_eq!(shifted.nx(), rect.nx());
    assert_eq!(shifted.ny(), rect.ny());
    let n = shifted.len();
    let mut d: Vec<Point> = (0..n)
        .map(|k| {
            let (p, r) = (shifted.coords[k], rect.coords[k]);
            [p[0] - r[0], p[1] - r[1]]
        })
        .collect();
    for _ in 0..iterations {
        let prev = d.clone();
        for i in 0..shifted.nx() {
            for j in 0..shifted.ny() {
                let k = shifted.idx(i, j);
                if prev[k] != [0.0, 0.0] {
                    continue;
                }
                let Some(nb) = shifted.stencil_indices(i, j) else {
                    continue;
                };
                let mut acc = [0.0; 2];
                for &q in &nb[1..] {
                    acc[0] += prev[q][0];
                    acc[1] += prev[q][1];
                }
                d[k] = [acc[0] / 4.0, acc[1] / 4.0];
            }
        }
    }
    let mut out = shifted.clone();
    for ((o, r), dk) in out.coords.iter_mut().zip(&rect.coords).zip(&d) {
        *o = [r[0] + dk[0], r[1] + dk[1]];
    }
    out.deformed = shifted.deformed || d.iter().any(|v| *v != [0.0, 0.0]);
    out
}
