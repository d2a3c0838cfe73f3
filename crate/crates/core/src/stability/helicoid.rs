use super::test_fn::{breakpoints, is_empty, Profile, Separable, TestFunction};
use super::operators::index_density;
use crate::error::{Error, Result};
use crate::group::euclid_to_frame;
use crate::numerics::{
    gauss_legendre_1d, try_gauss_legendre_1d_breaks, try_integrate_2d_breaks, CompensatedSum, QuadratureSpec, Rect,
};
use crate::surfaces::{surface_frame, Chart, Helicoid};

/// Half-width of the band around each singular helix where the s-factor
/// of a test function must be constant.
pub const TUBE_MARGIN: f64 = 0.05;

/// Antiderivative of `(16s⁴+8s²+1)/(4s²−1)` on `s > 1/2`.
pub fn bracket_antiderivative(s: f64) -> f64 {
    4.0 * s * s * s / 3.0 + 3.0 * s + ((2.0 * s - 1.0) / (2.0 * s + 1.0)).ln()
}

fn check_bracket(k: f64, delta: f64) -> Result<()> {
    if !(k > 0.5 && k.is_finite()) {
        return Err(Error::Domain(format!("bracket integral needs k > 1/2, got {k}")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("bracket integral needs delta > 0, got {delta}")));
    }
    Ok(())
}

/// `C(k,δ) = δ⁻²∫_k^{k+δ}(16s⁴+8s²+1)/(4s²−1) ds` from the closed antiderivative.
pub fn bracket_integral(k: f64, delta: f64) -> Result<f64> {
    check_bracket(k, delta)?;
    Ok((bracket_antiderivative(k + delta) - bracket_antiderivative(k)) / (delta * delta))
}

/// The same bracket by adaptive quadrature, as an independent check.
pub fn bracket_integral_quadrature(k: f64, delta: f64, tol: f64) -> Result<f64> {
    check_bracket(k, delta)?;
    let spec = QuadratureSpec::new(16, (4, 1))?.with_adaptive_tol(tol);
    let g = |s: f64| {
        let s2 = s * s;
        (16.0 * s2 * s2 + 8.0 * s2 + 1.0) / (4.0 * s2 - 1.0)
    };
    Ok(gauss_legendre_1d(g, k, k + delta, &spec)? / (delta * delta))
}

/// Catalog helicoid whose chart domain covers `support`.
fn helicoid_over(r: f64, support: Rect) -> Result<Helicoid> {
    let mut h = Helicoid::new(r)?;
    let d = h.domain;
    h.domain = Rect::new(d.x0.min(support.x0), d.x1.max(support.x1), d.y0.min(support.y0), d.y1.max(support.y1));
    Ok(h)
}

/// Rejects s-factors that are not constant across both singular helices.
pub fn check_tube(r: f64, u: &Separable) -> Result<()> {
    for c in [-1.0 / r, 1.0 / r] {
        if !u.f.is_constant_on(c - TUBE_MARGIN, c + TUBE_MARGIN) {
            return Err(Error::TubeViolation(format!(
                "s-factor {:?} is not constant on [{}, {}]",
                u.f,
                c - TUBE_MARGIN,
                c + TUBE_MARGIN
            )));
        }
    }
    Ok(())
}

/// Checks that ε is arclength on both singular helices.
fn check_arclength(hel: &Helicoid, eps: &[f64]) -> Result<()> {
    for &e in eps {
        for s in [-1.0 / hel.r, 1.0 / hel.r] {
            let j = hel.jet(s, e)?;
            let len = euclid_to_frame(j.p, j.f2).norm();
            if (len - 1.0).abs() > 1e-12 {
                return Err(Error::Domain(format!("|F_eps| = {len} on the singular curve s = {s}")));
            }
        }
    }
    Ok(())
}

/// Parts of `Q(u)` computed separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParts {
    /// `∫|N_h|⁻¹{Z(u)² − q u²} dΣ` over the regular part.
    pub regular: f64,
    /// `∫_{Σ₀} u² dΣ₀` over both helices.
    pub trace_sq: f64,
    /// `∫_{Σ₀} S(u)² dΣ₀`.
    pub trace_deriv_sq: f64,
}

impl QParts {
    pub fn total(&self) -> f64 {
        self.regular - 4.0 * self.trace_sq + self.trace_deriv_sq
    }
}

/// Terms of `Q(u)` on the helicoid H_R for `u(s, ε) = f(s)·g(ε)` in chart order.
pub fn q_form_parts(r: f64, u: &Separable, quad: &QuadratureSpec) -> Result<QParts> {
    if u.is_zero() {
        return Ok(QParts { regular: 0.0, trace_sq: 0.0, trace_deriv_sq: 0.0 });
    }
    let sup = u.support();
    if !(sup.x0.is_finite() && sup.x1.is_finite() && sup.y0.is_finite() && sup.y1.is_finite()) {
        return Err(Error::InvalidSpec("Q(u) needs a compactly supported u".into()));
    }
    check_tube(r, u)?;
    let hel = helicoid_over(r, sup)?;
    let (fb, gb) = u.breaks();
    let xb = breakpoints(sup.x0, sup.x1, fb.into_iter().chain(hel.kinks_u1()));
    let yb = breakpoints(sup.y0, sup.y1, gb);
    check_arclength(&hel, &[yb[0], 0.5 * (yb[0] + yb[yb.len() - 1]), yb[yb.len() - 1]])?;

    let regular = try_integrate_2d_breaks(
        |s, e| {
            let v = u.value(s, e);
            let g = u.grad(s, e);
            if v == 0.0 && g == (0.0, 0.0) {
                return Ok(0.0);
            }
            let f = surface_frame(&hel, (s, e))?;
            Ok(index_density(&f, v, g, v, g))
        },
        &xb,
        &yb,
        quad,
    )?;
    let quad1 = QuadratureSpec::new(quad.points_per_cell, (quad.cells.1, 1))?;
    let mut sq = CompensatedSum::new();
    let mut dsq = CompensatedSum::new();
    for c in [-1.0 / r, 1.0 / r] {
        sq.add(try_gauss_legendre_1d_breaks(|e| Ok(u.value(c, e).powi(2)), &yb, &quad1)?);
        dsq.add(try_gauss_legendre_1d_breaks(|e| Ok(u.grad(c, e).1.powi(2)), &yb, &quad1)?);
    }
    Ok(QParts { regular, trace_sq: sq.total(), trace_deriv_sq: dsq.total() })
}

/// `Q(u) = ∫|N_h|⁻¹{Z(u)²−q u²}dΣ − 4∫_{Σ₀}u² + ∫_{Σ₀}S(u)²`.
pub fn q_form(r: f64, u: &Separable, quad: &QuadratureSpec) -> Result<f64> {
    Ok(q_form_parts(r, u, quad)?.total())
}

/// Euclidean curvature `ẋÿ − ẏẍ` of the projection of a singular helix,
/// `side = ±1` selecting `s = ±1/R`.
pub fn singular_curve_curvature(r: f64, side: f64, eps: f64) -> Result<f64> {
    let hel = Helicoid::new(r)?;
    let j = hel.jet(side / r, eps)?;
    let (xd, yd) = (j.f2[0], j.f2[1]);
    let (xdd, ydd) = (j.f22[0], j.f22[1]);
    Ok(xd * ydd - yd * xdd)
}

/// Vertical variation `r ↦ r·w(ε)T` supported near a singular curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalVariation {
    pub w: Profile,
    pub eps_range: (f64, f64),
    /// Step of the central differences in `r`.
    pub r_stencil: f64,
    /// Euclidean curvature of the projected singular curve.
    pub h_curv: f64,
    /// Half-width of the s-window around the singular curve.
    pub s_window: f64,
}

impl VerticalVariation {
    /// Variation near the helix `s = 1/R` of H_R; ε-range is the support of `w`.
    pub fn helicoid(r: f64, w: Profile, s_window: f64) -> Result<Self> {
        let (a, b) = w.support();
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidSpec("vertical variation needs a compactly supported w".into()));
        }
        Ok(Self { w, eps_range: (a, b), r_stencil: 1e-3, h_curv: singular_curve_curvature(r, 1.0, 0.0)?, s_window })
    }

    pub fn with_eps_range(mut self, a: f64, b: f64) -> Self {
        self.eps_range = (a, b);
        self
    }
}

/// `∫∫|s(−2 + s·h) + r·ẇ(ε)| ds dε` over `eps_range × [−s₀, s₀]`, the
/// s-integral split at the kink `s*(ε)`.
pub fn vertical_variation_area(vv: &VerticalVariation, r: f64, quad: &QuadratureSpec) -> Result<f64> {
    let h = vv.h_curv;
    let s0 = vv.s_window;
    if !(s0 > 0.0 && s0.is_finite()) {
        return Err(Error::InvalidSpec(format!("s-window must be positive, got {s0}")));
    }
    let inner = QuadratureSpec::new(quad.points_per_cell.min(8), (1, 1))?;
    let g = move |s: f64, c: f64| (s * (-2.0 + s * h) + c).abs();
    let eb = breakpoints(vv.eps_range.0, vv.eps_range.1, vv.w.kinks());
    let quad1 = QuadratureSpec::new(quad.points_per_cell, (quad.cells.0, 1))?;
    try_gauss_legendre_1d_breaks(
        |e| {
            let c = r * vv.w.deriv(e);
            // roots of h s² − 2 s + c = 0
            let disc = 1.0 - h * c;
            if disc < 0.0 {
                return Err(Error::TubeTooSmall { s0, root: f64::NAN });
            }
            let near = c / (1.0 + disc.sqrt());
            if near.abs() >= s0 {
                return Err(Error::TubeTooSmall { s0, root: near });
            }
            if h != 0.0 {
                let far = (1.0 + disc.sqrt()) / h;
                if far.abs() <= s0 {
                    return Err(Error::TubeTooSmall { s0, root: far });
                }
            }
            let a = gauss_legendre_1d(|s| g(s, c), -s0, near, &inner)?;
            let b = gauss_legendre_1d(|s| g(s, c), near, s0, &inner)?;
            Ok(a + b)
        },
        &eb,
        &quad1,
    )
}

/// First and second central differences of the vertical-variation area at `r = 0`.
pub fn vertical_variation_differences(vv: &VerticalVariation, quad: &QuadratureSpec) -> Result<(f64, f64)> {
    let h = vv.r_stencil;
    let ap = vertical_variation_area(vv, h, quad)?;
    let a0 = vertical_variation_area(vv, 0.0, quad)?;
    let am = vertical_variation_area(vv, -h, quad)?;
    Ok(((ap - am) / (2.0 * h), (ap - 2.0 * a0 + am) / (h * h)))
}

/// `∫_{∂E_σ}(ξ+μ)⟨Z,η⟩ dl` over the four curves `s = ±1/R ± σ`, for the
/// variation that is purely vertical (`w = v/⟨N,T⟩`) on the tube boundary.
pub fn boundary_flux(r: f64, v: &dyn TestFunction, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma < 0.5 / r) {
        return Err(Error::InvalidSpec(format!("sigma must lie in (0, 1/(2R)), got {sigma}")));
    }
    let sup = v.support();
    if is_empty(&sup) {
        return Ok(0.0);
    }
    if !(sup.y0.is_finite() && sup.y1.is_finite()) {
        return Err(Error::InvalidSpec("boundary flux needs v compactly supported in eps".into()));
    }
    let hel = helicoid_over(r, sup)?;
    let (_, yk) = v.breaks();
    let yb = breakpoints(sup.y0, sup.y1, yk);
    let quad = QuadratureSpec::default();
    let mut total = CompensatedSum::new();
    for (sing, side) in [(1.0 / r, 1.0), (1.0 / r, -1.0), (-1.0 / r, 1.0), (-1.0 / r, -1.0)] {
        let s = sing + side * sigma;
        if s < sup.x0 || s > sup.x1 {
            continue;
        }
        total.add(try_gauss_legendre_1d_breaks(
            |e| {
                let val = v.value(s, e);
                if val == 0.0 {
                    return Ok(0.0);
                }
                let f = surface_frame(&hel, (s, e))?;
                let j = hel.jet(s, e)?;
                let fe = euclid_to_frame(j.p, j.f2);
                let fs = euclid_to_frame(j.p, j.f1);
                let te = fe * (1.0 / fe.norm());
                let eta = (fs - fs.dot(&te) * te).normalized() * side;
                let one_minus = 1.0 - f.bzs;
                let xi = f.nt * one_minus * val * val;
                let w = val / f.nt;
                let mu = f.nh_norm * f.nh_norm * (f.nt * one_minus * w * w);
                Ok((xi + mu) * f.z.dot(&eta) * fe.norm())
            },
            &yb,
            &quad,
        )?);
    }
    Ok(total.total())
}

/// Two-level Richardson extrapolation (ratio 10, error O(σ)) of the
/// boundary flux from `σ`, `σ/10`, `σ/100`.
pub fn boundary_flux_limit(r: f64, v: &dyn TestFunction, sigma: f64) -> Result<(f64, [f64; 3])> {
    let b = [boundary_flux(r, v, sigma)?, boundary_flux(r, v, sigma / 10.0)?, boundary_flux(r, v, sigma / 100.0)?];
    let r1 = [(10.0 * b[1] - b[0]) / 9.0, (10.0 * b[2] - b[1]) / 9.0];
    Ok(((100.0 * r1[1] - r1[0]) / 99.0, b))
}
