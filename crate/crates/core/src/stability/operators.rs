use super::test_fn::{breakpoints, intersect, is_empty, TestFunction};
use crate::error::{Error, Result};
use crate::geodesics::exp_map;
use crate::group::{euclid_to_frame, FrameVector, Point};
use crate::numerics::{central_diff_n, try_central_diff, try_integrate_2d_breaks, DiffSpec, QuadratureSpec, Rect};
use crate::surfaces::{normal_data, s_flow, surface_frame, z_flow, Chart, SurfaceFrame};

/// Stencil for derivatives along Z and S.
pub const Z_DIFF: DiffSpec = DiffSpec { step: 1e-4, richardson_levels: 1 };

/// Scalar quantity read off a surface frame.
pub trait FrameScalar: Sync {
    fn eval(&self, f: &SurfaceFrame) -> f64;
}

impl<F: Fn(&SurfaceFrame) -> f64 + Sync> FrameScalar for F {
    fn eval(&self, f: &SurfaceFrame) -> f64 {
        self(f)
    }
}

/// Named frame quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceField {
    Nh,
    Nt,
    Bzs,
    Bss,
    Q,
    Const(f64),
}

impl FrameScalar for SurfaceField {
    fn eval(&self, f: &SurfaceFrame) -> f64 {
        match *self {
            SurfaceField::Nh => f.nh_norm,
            SurfaceField::Nt => f.nt,
            SurfaceField::Bzs => f.bzs,
            SurfaceField::Bss => f.bss,
            SurfaceField::Q => f.q(),
            SurfaceField::Const(c) => c,
        }
    }
}

fn stopped(e: Error) -> Error {
    match e {
        Error::SingularPoint { .. } => Error::StoppedAtSingular { steps: 0 },
        other => other,
    }
}

/// Z-derivative of order 1 or 2 of `field` at `u`. Samples lie on the
/// integral curve of Z through `u` (one RK4 step per sample), which on a
/// minimal surface is the straight characteristic line.
pub fn z_derivative<C, F>(chart: &C, field: &F, u: (f64, f64), order: u8) -> Result<f64>
where
    C: Chart + ?Sized,
    F: FrameScalar + ?Sized,
{
    surface_frame(chart, u).map_err(stopped)?;
    try_central_diff(
        |tau| {
            let p = if tau == 0.0 { u } else { z_flow(chart, u, tau).map_err(stopped)? };
            Ok(field.eval(&surface_frame(chart, p).map_err(stopped)?))
        },
        0.0,
        &Z_DIFF,
        order,
    )
}

/// S-derivative of order 1 or 2, sampled along the integral curve of S.
pub fn s_derivative<C, F>(chart: &C, field: &F, u: (f64, f64), order: u8) -> Result<f64>
where
    C: Chart + ?Sized,
    F: FrameScalar + ?Sized,
{
    surface_frame(chart, u).map_err(stopped)?;
    try_central_diff(
        |tau| {
            let p = if tau == 0.0 { u } else { s_flow(chart, u, tau).map_err(stopped)? };
            Ok(field.eval(&surface_frame(chart, p).map_err(stopped)?))
        },
        0.0,
        &Z_DIFF,
        order,
    )
}

/// Covariant derivative `D_Z W` of a frame-valued quantity along the
/// integral curve of Z.
pub fn z_covariant<C, W>(chart: &C, w: W, u: (f64, f64)) -> Result<FrameVector>
where
    C: Chart + ?Sized,
    W: Fn(&SurfaceFrame) -> FrameVector,
{
    let f0 = surface_frame(chart, u).map_err(stopped)?;
    let d = central_diff_n(
        |tau| {
            let p = if tau == 0.0 { u } else { z_flow(chart, u, tau).map_err(stopped)? };
            Ok(w(&surface_frame(chart, p).map_err(stopped)?).to_array())
        },
        0.0,
        &Z_DIFF,
        1,
    )?;
    Ok(FrameVector::from_array(d) + crate::connection::christoffel(f0.z, w(&f0)))
}

/// Stability operator applied to `field`:
/// `|N_h|⁻¹{Z(Z(v)) + 2|N_h|⁻¹⟨N,T⟩⟨B(Z),S⟩Z(v) + (|B(Z)+S|²−4|N_h|²)v}`.
pub fn operator_l<C, F>(chart: &C, field: &F, u: (f64, f64)) -> Result<f64>
where
    C: Chart + ?Sized,
    F: FrameScalar + ?Sized,
{
    let f = surface_frame(chart, u).map_err(stopped)?;
    let v = field.eval(&f);
    let zv = z_derivative(chart, field, u, 1)?;
    let zzv = z_derivative(chart, field, u, 2)?;
    let nh = f.nh_norm;
    Ok((zzv + 2.0 / nh * f.nt * f.bzs * zv + f.q() * v) / nh)
}

/// `L(|N_h|) = 4(|N_h|⁻²⟨B(Z),S⟩ − 1)` from the frame alone.
pub fn l_nh_closed<C: Chart + ?Sized>(chart: &C, u: (f64, f64)) -> Result<f64> {
    Ok(l_nh_of(&surface_frame(chart, u)?))
}

pub fn l_nh_of(f: &SurfaceFrame) -> f64 {
    4.0 * (f.bzs / (f.nh_norm * f.nh_norm) - 1.0)
}

/// Vertical component `⟨V,T⟩(s) = a s² + b s + c` of the Jacobi field of
/// the characteristic lines through the S-curve at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiQuadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub disc: f64,
}

impl JacobiQuadratic {
    pub fn eval(&self, s: f64) -> f64 {
        (self.a * s + self.b) * s + self.c
    }

    /// `L(|N_h|)` at distance `s` along the characteristic line,
    /// `−(b²−4ac)/(a s²+b s+c)²`.
    pub fn l_nh_along(&self, s: f64) -> f64 {
        let p = self.eval(s);
        -self.disc / (p * p)
    }
}

pub fn jacobi_quadratic_of(f: &SurfaceFrame) -> JacobiQuadratic {
    let (nh, nt) = (f.nh_norm, f.nt);
    let c = -nh;
    let b = -2.0 * nt;
    let a = -(f.bzs + nt * nt - nh * nh) / nh;
    JacobiQuadratic { a, b, c, disc: b * b - 4.0 * a * c }
}

pub fn jacobi_vertical_quadratic<C: Chart + ?Sized>(chart: &C, u0: (f64, f64)) -> Result<JacobiQuadratic> {
    Ok(jacobi_quadratic_of(&surface_frame(chart, u0)?))
}

/// Integration rectangle and breakpoints for a pair of test functions.
fn common_region<C: Chart + ?Sized>(
    chart: &C,
    uf: &dyn TestFunction,
    vf: &dyn TestFunction,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let r = intersect(&intersect(&uf.support(), &vf.support()), &chart.domain());
    if is_empty(&r) {
        return None;
    }
    let (a1, a2) = uf.breaks();
    let (b1, b2) = vf.breaks();
    let xb = breakpoints(r.x0, r.x1, a1.into_iter().chain(b1).chain(chart.kinks_u1()));
    let yb = breakpoints(r.y0, r.y1, a2.into_iter().chain(b2).chain(chart.kinks_u2()));
    Some((xb, yb))
}

fn z_of(f: &SurfaceFrame, g: (f64, f64)) -> f64 {
    f.zeta.0 * g.0 + f.zeta.1 * g.1
}

/// Pointwise integrand of the index form against chart measure.
pub fn index_density(f: &SurfaceFrame, u: f64, gu: (f64, f64), v: f64, gv: (f64, f64)) -> f64 {
    (z_of(f, gu) * z_of(f, gv) - f.q() * u * v) / f.nh_norm * f.jacobian
}

/// `I(u,v) = ∫|N_h|⁻¹{Z(u)Z(v) − (|B(Z)+S|²−4|N_h|²)uv} dΣ` over the common
/// support, which must avoid the singular set.
pub fn index_form<C: Chart + ?Sized>(
    chart: &C,
    uf: &dyn TestFunction,
    vf: &dyn TestFunction,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let Some((xb, yb)) = common_region(chart, uf, vf) else {
        return Ok(0.0);
    };
    try_integrate_2d_breaks(
        |a, b| {
            let (u, v) = (uf.value(a, b), vf.value(a, b));
            let (gu, gv) = (uf.grad(a, b), vf.grad(a, b));
            if u == 0.0 && v == 0.0 && gu == (0.0, 0.0) && gv == (0.0, 0.0) {
                return Ok(0.0);
            }
            Ok(index_density(&surface_frame(chart, (a, b))?, u, gu, v, gv))
        },
        &xb,
        &yb,
        quad,
    )
}

/// `∫|N_h|{Z(f)² − L(|N_h|)f²} dΣ`, the right side of the identity for
/// `I(f|N_h|, f|N_h|)`.
pub fn index_form_nh_weighted<C: Chart + ?Sized>(chart: &C, ff: &dyn TestFunction, quad: &QuadratureSpec) -> Result<f64> {
    let Some((xb, yb)) = common_region(chart, ff, ff) else {
        return Ok(0.0);
    };
    try_integrate_2d_breaks(
        |a, b| {
            let v = ff.value(a, b);
            let g = ff.grad(a, b);
            if v == 0.0 && g == (0.0, 0.0) {
                return Ok(0.0);
            }
            let f = surface_frame(chart, (a, b))?;
            let zf = z_of(&f, g);
            Ok(f.nh_norm * (zf * zf - l_nh_of(&f) * v * v) * f.jacobian)
        },
        &xb,
        &yb,
        quad,
    )
}

/// Area derivatives of the variation `p ↦ exp_p(τ(vN + wT))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaVariation {
    /// Area of the undeformed support region.
    pub a0: f64,
    pub first: f64,
    pub second: f64,
}

/// Deformed point and its chart partials (central differences).
fn deformed_partials<C: Chart + ?Sized>(
    chart: &C,
    v: &dyn TestFunction,
    w: &dyn TestFunction,
    tau: f64,
    u: (f64, f64),
) -> Result<(Point, [f64; 3], [f64; 3])> {
    let map = |a: f64, b: f64| -> Result<[f64; 3]> {
        let nd = normal_data(chart, (a, b))?;
        let field = v.value(a, b) * nd.n_unit + w.value(a, b) * FrameVector::T;
        Ok(exp_map(nd.point, tau * field).to_array())
    };
    let spec = DiffSpec { step: 1e-4, richardson_levels: 1 };
    let d1 = central_diff_n(|a| map(a, u.1), u.0, &spec, 1)?;
    let d2 = central_diff_n(|b| map(u.0, b), u.1, &spec, 1)?;
    Ok((Point::from_array(map(u.0, u.1)?), d1, d2))
}

/// Sub-Riemannian area of the deformed support region at time `tau`.
fn deformed_area<C: Chart + ?Sized>(
    chart: &C,
    v: &dyn TestFunction,
    w: &dyn TestFunction,
    tau: f64,
    xb: &[f64],
    yb: &[f64],
    quad: &QuadratureSpec,
) -> Result<f64> {
    try_integrate_2d_breaks(
        |a, b| {
            let (p, d1, d2) = deformed_partials(chart, v, w, tau, (a, b))?;
            let n = euclid_to_frame(p, d1).cross(&euclid_to_frame(p, d2));
            Ok(n.horizontal().norm())
        },
        xb,
        yb,
        quad,
    )
}

/// Derivatives of the area along the geodesic variation by `vN + wT`,
/// from central differences in the variation parameter with step `s_step`
/// and two Richardson levels.
pub fn area_variation<C: Chart + ?Sized>(
    chart: &C,
    v: &dyn TestFunction,
    w: &dyn TestFunction,
    quad: &QuadratureSpec,
    s_step: f64,
) -> Result<AreaVariation> {
    if !(s_step > 0.0 && s_step.is_finite()) {
        return Err(Error::InvalidSpec(format!("variation step must be positive, got {s_step}")));
    }
    let sv = v.support();
    let sw = w.support();
    let hull = if is_empty(&sv) {
        sw
    } else if is_empty(&sw) {
        sv
    } else {
        Rect::new(sv.x0.min(sw.x0), sv.x1.max(sw.x1), sv.y0.min(sw.y0), sv.y1.max(sw.y1))
    };
    let r = intersect(&hull, &chart.domain());
    if is_empty(&r) {
        return Ok(AreaVariation { a0: 0.0, first: 0.0, second: 0.0 });
    }
    let (v1, v2) = v.breaks();
    let (w1, w2) = w.breaks();
    let xb = breakpoints(r.x0, r.x1, v1.into_iter().chain(w1).chain(chart.kinks_u1()));
    let yb = breakpoints(r.y0, r.y1, v2.into_iter().chain(w2).chain(chart.kinks_u2()));
    let area = |tau: f64| deformed_area(chart, v, w, tau, &xb, &yb, quad);
    let spec = DiffSpec { step: s_step, richardson_levels: 2 };
    let a0 = area(0.0)?;
    let first = try_central_diff(&area, 0.0, &spec, 1)?;
    let second = try_central_diff(&area, 0.0, &spec, 2)?;
    Ok(AreaVariation { a0, first, second })
}

/// `A''(0)` for the variation by `vN + wT`.
pub fn second_variation_direct<C: Chart + ?Sized>(
    chart: &C,
    v: &dyn TestFunction,
    w: &dyn TestFunction,
    quad: &QuadratureSpec,
    s_step: f64,
) -> Result<f64> {
    Ok(area_variation(chart, v, w, quad, s_step)?.second)
}
