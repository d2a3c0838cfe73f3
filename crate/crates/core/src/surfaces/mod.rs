//! Parameterized surface patches and their sub-Riemannian invariants.

mod catalog;
mod ruled;

pub use catalog::{AffineImage, Catenoid, Helicoid, Paraboloid, Plane, VerticalPlane};
pub use ruled::{ruled_coordinates, RuledChart};

use crate::connection::christoffel;
use crate::error::{Error, Result};
use crate::group::{euclid_to_frame, frame_to_euclid, jop, FrameVector, Point};
use crate::numerics::{try_integrate_2d_breaks, QuadratureSpec, Rect};

/// `|N_h|` at or below this value marks a singular point.
pub const SINGULAR_TOL: f64 = 1e-9;

/// Position and Euclidean partials of a chart through second order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartJet {
    pub p: Point,
    pub f1: [f64; 3],
    pub f2: [f64; 3],
    pub f11: [f64; 3],
    pub f12: [f64; 3],
    pub f22: [f64; 3],
}

pub trait Chart: Send + Sync {
    fn domain(&self) -> Rect;
    fn jet(&self, u1: f64, u2: f64) -> Result<ChartJet>;

    fn eval(&self, u1: f64, u2: f64) -> Result<Point> {
        Ok(self.jet(u1, u2)?.p)
    }

    /// +1 keeps `N = F₁×F₂/|F₁×F₂|`, −1 reverses it.
    fn orientation(&self) -> f64 {
        1.0
    }

    /// Known to be area-stationary, so characteristic curves are straight.
    fn is_minimal(&self) -> bool {
        false
    }

    /// Coordinate values where the area density has a kink (singular curves
    /// lying on coordinate lines), used to split quadrature cells.
    fn kinks_u1(&self) -> Vec<f64> {
        Vec::new()
    }
    fn kinks_u2(&self) -> Vec<f64> {
        Vec::new()
    }

    fn label(&self) -> String;
}

impl<C: Chart + ?Sized> Chart for &C {
    fn domain(&self) -> Rect {
        (**self).domain()
    }
    fn jet(&self, u1: f64, u2: f64) -> Result<ChartJet> {
        (**self).jet(u1, u2)
    }
    fn orientation(&self) -> f64 {
        (**self).orientation()
    }
    fn is_minimal(&self) -> bool {
        (**self).is_minimal()
    }
    fn kinks_u1(&self) -> Vec<f64> {
        (**self).kinks_u1()
    }
    fn kinks_u2(&self) -> Vec<f64> {
        (**self).kinks_u2()
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

/// Normal data available at every immersed point, singular or not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalData {
    pub point: Point,
    pub f1: FrameVector,
    pub f2: FrameVector,
    /// Unnormalized, oriented `F₁×F₂`.
    pub n: FrameVector,
    pub n_unit: FrameVector,
    pub nh_norm: f64,
    pub nt: f64,
}

impl NormalData {
    /// Sub-Riemannian area density with respect to chart measure, `|N_h|·|F₁×F₂|`.
    pub fn area_density(&self) -> f64 {
        self.n.horizontal().norm()
    }
}

pub fn normal_data<C: Chart + ?Sized>(chart: &C, u: (f64, f64)) -> Result<NormalData> {
    let jet = chart.jet(u.0, u.1)?;
    normal_from_jet(chart.orientation(), &jet)
}

fn normal_from_jet(orient: f64, jet: &ChartJet) -> Result<NormalData> {
    let f1 = euclid_to_frame(jet.p, jet.f1);
    let f2 = euclid_to_frame(jet.p, jet.f2);
    let n = orient * f1.cross(&f2);
    let len = n.norm();
    if !len.is_finite() {
        return Err(Error::NonFinite("surface normal"));
    }
    if len == 0.0 {
        return Err(Error::Domain("chart is not an immersion here (F1 x F2 = 0)".into()));
    }
    let n_unit = n * (1.0 / len);
    Ok(NormalData {
        point: jet.p,
        f1,
        f2,
        n,
        n_unit,
        nh_norm: n_unit.horizontal().norm(),
        nt: n_unit.c,
    })
}

/// Full pointwise frame at a regular point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceFrame {
    pub point: Point,
    pub n: FrameVector,
    pub nh_norm: f64,
    pub nt: f64,
    pub nu_h: FrameVector,
    pub z: FrameVector,
    pub s: FrameVector,
    pub bz: FrameVector,
    pub bs: FrameVector,
    pub bzz: f64,
    pub bzs: f64,
    pub bss: f64,
    pub h: f64,
    pub hr: f64,
    /// Chart-coordinate components of Z and S.
    pub zeta: (f64, f64),
    pub sigma: (f64, f64),
    /// Riemannian area element `|F₁×F₂|` relative to chart measure.
    pub jacobian: f64,
}

impl SurfaceFrame {
    /// `q = |B(Z)+S|² − 4|N_h|²`.
    pub fn q(&self) -> f64 {
        let v = self.bz + self.s;
        v.dot(&v) - 4.0 * self.nh_norm * self.nh_norm
    }
}

/// Chart-parameter derivative `∂_j` of the frame coefficients of `F_i`.
fn d_frame(jet: &ChartJet, fi: [f64; 3], fij: [f64; 3], fj: [f64; 3]) -> FrameVector {
    let (x, y) = (jet.p.x, jet.p.y);
    FrameVector::new(
        fij[0],
        fij[1],
        fij[2] - fij[0] * y - fi[0] * fj[1] + fij[1] * x + fi[1] * fj[0],
    )
}

fn solve_gram(f1: FrameVector, f2: FrameVector, w: FrameVector) -> (f64, f64) {
    let (g11, g12, g22) = (f1.dot(&f1), f1.dot(&f2), f2.dot(&f2));
    let (r1, r2) = (w.dot(&f1), w.dot(&f2));
    let det = g11 * g22 - g12 * g12;
    ((g22 * r1 - g12 * r2) / det, (g11 * r2 - g12 * r1) / det)
}

pub fn surface_frame<C: Chart + ?Sized>(chart: &C, u: (f64, f64)) -> Result<SurfaceFrame> {
    let jet = chart.jet(u.0, u.1)?;
    let nd = normal_from_jet(chart.orientation(), &jet)?;
    if nd.nh_norm <= SINGULAR_TOL {
        return Err(Error::SingularPoint { u1: u.0, u2: u.1, nh: nd.nh_norm });
    }
    let n = nd.n_unit;
    let nu_h = n.horizontal() * (1.0 / nd.nh_norm);
    let z = jop(nu_h);
    let s = nd.nt * nu_h - nd.nh_norm * FrameVector::T;

    let len = nd.n.norm();
    let orient = chart.orientation();
    let shape = |fj_e: [f64; 3], f1j: [f64; 3], f2j: [f64; 3], fj: FrameVector| {
        let d1 = d_frame(&jet, jet.f1, f1j, fj_e);
        let d2 = d_frame(&jet, jet.f2, f2j, fj_e);
        let dn = orient * (d1.cross(&nd.f2) + nd.f1.cross(&d2));
        let dn_unit = (dn - n.dot(&dn) * n) * (1.0 / len);
        -(dn_unit + christoffel(fj, n))
    };
    let b1 = shape(jet.f1, jet.f11, jet.f12, nd.f1);
    let b2 = shape(jet.f2, jet.f12, jet.f22, nd.f2);
    let zeta = solve_gram(nd.f1, nd.f2, z);
    let sigma = solve_gram(nd.f1, nd.f2, s);
    let bz = zeta.0 * b1 + zeta.1 * b2;
    let bs = sigma.0 * b1 + sigma.1 * b2;
    let (bzz, bzs, bss) = (bz.dot(&z), bz.dot(&s), bs.dot(&s));
    let out = SurfaceFrame {
        point: nd.point,
        n,
        nh_norm: nd.nh_norm,
        nt: nd.nt,
        nu_h,
        z,
        s,
        bz,
        bs,
        bzz,
        bzs,
        bss,
        h: bzz / (2.0 * nd.nh_norm),
        hr: 0.5 * (bzz + bss),
        zeta,
        sigma,
        jacobian: len,
    };
    if [out.bzz, out.bzs, out.bss, out.zeta.0, out.zeta.1, out.sigma.0, out.sigma.1]
        .iter()
        .all(|v| v.is_finite())
    {
        Ok(out)
    } else {
        Err(Error::NonFinite("surface frame"))
    }
}

/// `(H, H_R)` with `H = ⟨B(Z),Z⟩/(2|N_h|)` and `H_R = (⟨B(Z),Z⟩+⟨B(S),S⟩)/2`.
pub fn mean_curvatures<C: Chart + ?Sized>(chart: &C, u: (f64, f64)) -> Result<(f64, f64)> {
    let f = surface_frame(chart, u)?;
    Ok((f.h, f.hr))
}

pub fn area_element<C: Chart + ?Sized>(chart: &C, u: (f64, f64)) -> Result<f64> {
    Ok(normal_data(chart, u)?.area_density())
}

fn breaks(lo: f64, hi: f64, kinks: Vec<f64>) -> Vec<f64> {
    let mut b = vec![lo];
    let mut k: Vec<f64> = kinks.into_iter().filter(|v| *v > lo && *v < hi).collect();
    k.sort_by(f64::total_cmp);
    b.extend(k);
    b.push(hi);
    b
}

/// Sub-Riemannian area of `region`, with quadrature cells split at the
/// chart's kink lines.
pub fn area<C: Chart + ?Sized>(chart: &C, region: Rect, quad: &QuadratureSpec) -> Result<f64> {
    let xb = breaks(region.x0, region.x1, chart.kinks_u1());
    let yb = breaks(region.y0, region.y1, chart.kinks_u2());
    try_integrate_2d_breaks(|a, b| area_element(chart, (a, b)), &xb, &yb, quad)
}

/// One RK4 step of length `tau` along the chart-coordinate flow of a tangent
/// field selected from the surface frame.
fn flow_step<C, F>(chart: &C, u: (f64, f64), tau: f64, field: &F) -> Result<(f64, f64)>
where
    C: Chart + ?Sized,
    F: Fn(&SurfaceFrame) -> (f64, f64),
{
    let rhs = |p: (f64, f64)| -> Result<(f64, f64)> { Ok(field(&surface_frame(chart, p)?)) };
    let k1 = rhs(u)?;
    let k2 = rhs((u.0 + 0.5 * tau * k1.0, u.1 + 0.5 * tau * k1.1))?;
    let k3 = rhs((u.0 + 0.5 * tau * k2.0, u.1 + 0.5 * tau * k2.1))?;
    let k4 = rhs((u.0 + tau * k3.0, u.1 + tau * k3.1))?;
    Ok((
        u.0 + tau / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        u.1 + tau / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    ))
}

/// Point reached from `u` after arclength `tau` along the characteristic curve.
pub fn z_flow<C: Chart + ?Sized>(chart: &C, u: (f64, f64), tau: f64) -> Result<(f64, f64)> {
    flow_step(chart, u, tau, &|f: &SurfaceFrame| f.zeta)
}

/// Point reached from `u` after arclength `tau` along the integral curve of S.
pub fn s_flow<C: Chart + ?Sized>(chart: &C, u: (f64, f64), tau: f64) -> Result<(f64, f64)> {
    flow_step(chart, u, tau, &|f: &SurfaceFrame| f.sigma)
}

fn singular_to_stopped(e: Error, steps: usize) -> Error {
    match e {
        Error::SingularPoint { .. } => Error::StoppedAtSingular { steps },
        other => other,
    }
}

/// Integral curve of Z from `F(u0)` sampled at `steps + 1` points.
pub fn characteristic_ray<C: Chart + ?Sized>(chart: &C, u0: (f64, f64), length: f64, steps: usize) -> Result<Vec<Point>> {
    if steps == 0 {
        return Err(Error::InvalidSpec("characteristic_ray needs at least one step".into()));
    }
    surface_frame(chart, u0).map_err(|e| singular_to_stopped(e, 0))?;
    let h = length / steps as f64;
    let mut u = u0;
    let mut out = vec![chart.eval(u.0, u.1)?];
    for i in 0..steps {
        u = z_flow(chart, u, h).map_err(|e| singular_to_stopped(e, i))?;
        let nd = normal_data(chart, u)?;
        if nd.nh_norm <= SINGULAR_TOL {
            return Err(Error::StoppedAtSingular { steps: i + 1 });
        }
        out.push(nd.point);
    }
    Ok(out)
}

/// Largest distance of the points from the line through the first two.
pub fn straightness_residual(points: &[Point]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let o = points[0].to_array();
    let d = points[1].to_array();
    let dir = [d[0] - o[0], d[1] - o[1], d[2] - o[2]];
    let dl = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
    let dir = [dir[0] / dl, dir[1] / dl, dir[2] / dl];
    points
        .iter()
        .map(|p| {
            let v = [p.x - o[0], p.y - o[1], p.t - o[2]];
            let along = v[0] * dir[0] + v[1] * dir[1] + v[2] * dir[2];
            let perp = [v[0] - along * dir[0], v[1] - along * dir[1], v[2] - along * dir[2]];
            (perp[0] * perp[0] + perp[1] * perp[1] + perp[2] * perp[2]).sqrt()
        })
        .fold(0.0, f64::max)
}

/// Uniform node lattice `n` points from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, n: usize) -> Self {
        Self { min, max, n }
    }

    pub fn node(&self, i: usize) -> f64 {
        if self.n <= 1 {
            self.min
        } else if i + 1 == self.n {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.n - 1) as f64
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub u1: Axis,
    pub u2: Axis,
}

impl Grid {
    pub fn new(u1: Axis, u2: Axis) -> Self {
        Self { u1, u2 }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SingularLocus {
    /// Cells `(i, j)` spanning nodes `i..=i+1` and `j..=j+1`.
    pub cells: Vec<(usize, usize)>,
    /// Zero crossings of |N_h| located on grid lines.
    pub points: Vec<(f64, f64)>,
}

impl SingularLocus {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty() && self.points.is_empty()
    }
}

/// Largest |N_h| accepted at a refined minimum on a grid edge.
const CROSSING_ACCEPT: f64 = 1e-7;

fn refine_edge<C: Chart + ?Sized>(chart: &C, a: (f64, f64), b: (f64, f64)) -> Result<Option<(f64, f64)>> {
    let at = |t: f64| (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
    let nh2 = |t: f64| -> Result<f64> {
        let n = normal_data(chart, at(t))?.nh_norm;
        Ok(n * n)
    };
    let slope = |t: f64| -> Result<f64> {
        let h = 1e-7;
        Ok(nh2((t + h).min(1.0))? - nh2((t - h).max(0.0))?)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    if !(slope(lo)? < 0.0 && slope(hi)? > 0.0) {
        return Ok(None);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slope(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let t = 0.5 * (lo + hi);
    Ok((nh2(t)?.sqrt() < CROSSING_ACCEPT).then(|| at(t)))
}

/// Cells of `grid` touching the zero set of |N_h|, together with refined
/// crossings along grid lines; both sorted lexicographically.
pub fn singular_locus<C: Chart + ?Sized>(chart: &C, grid: &Grid, tol: f64) -> Result<SingularLocus> {
    let (n1, n2) = (grid.u1.n, grid.u2.n);
    let mut out = SingularLocus::default();
    if n1 < 2 || n2 < 2 {
        return Ok(out);
    }
    let g1 = grid.u1.nodes();
    let g2 = grid.u2.nodes();
    let mut nh = vec![vec![0.0; n2]; n1];
    for i in 0..n1 {
        for j in 0..n2 {
            nh[i][j] = normal_data(chart, (g1[i], g2[j]))?.nh_norm;
        }
    }
    let mut flagged = std::collections::BTreeSet::new();
    let mut points = Vec::new();
    for i in 0..n1 {
        for j in 0..n2 {
            if nh[i][j] < tol {
                points.push((g1[i], g2[j]));
                for ci in i.saturating_sub(1)..=i.min(n1 - 2) {
                    for cj in j.saturating_sub(1)..=j.min(n2 - 2) {
                        flagged.insert((ci, cj));
                    }
                }
            }
        }
    }
    // edges along u1 (fixed u2 = g2[j]) then along u2
    for j in 0..n2 {
        for i in 0..n1 - 1 {
            if let Some(p) = refine_edge(chart, (g1[i], g2[j]), (g1[i + 1], g2[j]))? {
                points.push(p);
                if j > 0 {
                    flagged.insert((i, j - 1));
                }
                if j < n2 - 1 {
                    flagged.insert((i, j));
                }
            }
        }
    }
    for i in 0..n1 {
        for j in 0..n2 - 1 {
            if let Some(p) = refine_edge(chart, (g1[i], g2[j]), (g1[i], g2[j + 1]))? {
                points.push(p);
                if i > 0 {
                    flagged.insert((i - 1, j));
                }
                if i < n1 - 1 {
                    flagged.insert((i, j));
                }
            }
        }
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    // a zero on a node can also be found from its incident edges
    let mut kept: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for p in points {
        if !kept.iter().any(|q| (p.0 - q.0).abs() < 1e-9 && (p.1 - q.1).abs() < 1e-9) {
            kept.push(p);
        }
    }
    let points = kept;
    out.cells = flagged.into_iter().collect();
    out.points = points;
    Ok(out)
}

/// Euclidean components of a tangent frame vector at `p` (re-exported helper).
pub fn euclid(p: Point, v: FrameVector) -> [f64; 3] {
    frame_to_euclid(p, v)
}

#[cfg(test)]
mod tests;
