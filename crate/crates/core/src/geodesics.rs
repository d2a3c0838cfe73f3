//! Closed-form geodesics of (H¹, g), the exponential map and Jacobi fields of
//! geodesic families.

use crate::connection::{christoffel, curvature_r};
use crate::error::{Error, Result};
use crate::group::{euclid_to_frame, frame_to_euclid, jop, FrameVector, Point};
use crate::numerics::{central_diff_n, DiffSpec};

const SERIES_SWITCH: f64 = 1e-4;

/// `f = sin x / x`, `g = (1 − cos x)/x`, `h = (x − sin x)/x²`.
///
/// Below `|x| = 1e-4` the truncated Maclaurin series are used. Above it the
/// evaluation avoids cancellation: `g` through `2 sin²(x/2)/x`, `h` through
/// the full alternating series while `|x| < 1`.
pub fn helpers_fgh(x: f64) -> (f64, f64, f64) {
    let ax = x.abs();
    if ax < SERIES_SWITCH {
        let x2 = x * x;
        return (
            1.0 - x2 / 6.0 + x2 * x2 / 120.0,
            x / 2.0 - x * x2 / 24.0,
            x / 6.0 - x * x2 / 120.0,
        );
    }
    let f = x.sin() / x;
    let hs = (0.5 * x).sin();
    let g = 2.0 * hs * hs / x;
    let h = if ax < 1.0 {
        // (x − sin x)/x² = Σ_{k≥1} (−1)^{k+1} x^{2k−1}/(2k+1)!
        let x2 = x * x;
        let mut term = x / 6.0;
        let mut sum = 0.0_f64;
        let mut k = 1.0_f64;
        while term.abs() > 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            sum += term;
            term *= -x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
            k += 1.0;
        }
        sum
    } else {
        (x - x.sin()) / (x * x)
    };
    (f, g, h)
}

/// Geodesic through `p0` with initial velocity `v0` (frame coefficients).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicArc {
    pub p0: Point,
    pub v0: FrameVector,
    /// Constant ⟨γ', T⟩.
    pub lambda: f64,
}

impl GeodesicArc {
    pub fn new(p0: Point, v0: FrameVector) -> Self {
        Self { p0, v0, lambda: v0.c }
    }

    /// Initial velocity given by Euclidean components.
    pub fn from_euclidean(p0: Point, e: [f64; 3]) -> Self {
        Self::new(p0, euclid_to_frame(p0, e))
    }
}

/// Position together with Euclidean first and second s-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicJet {
    pub point: Point,
    pub vel: [f64; 3],
    pub acc: [f64; 3],
}

/// Closed-form position and Euclidean s-derivatives.
pub fn geodesic_jet(arc: &GeodesicArc, s: f64) -> GeodesicJet {
    let Point { x: x0, y: y0, t: t0 } = arc.p0;
    let (a, b, l) = (arc.v0.a, arc.v0.b, arc.lambda);
    let th = 2.0 * l * s;
    let (f, g, h) = helpers_fgh(th);
    let (sn, cs) = th.sin_cos();
    let x = x0 + a * s * f + b * s * g;
    let y = y0 - a * s * g + b * s * f;
    let t = t0 + l * s + (a * a + b * b) * s * s * h + (a * x0 + b * y0) * s * g + (a * y0 - b * x0) * s * f;
    let xd = a * cs + b * sn;
    let yd = -a * sn + b * cs;
    let td = l + (a * a + b * b) * s * g + (a * x0 + b * y0) * sn + (a * y0 - b * x0) * cs;
    let xdd = 2.0 * l * yd;
    let ydd = -2.0 * l * xd;
    let tdd = xdd * y - ydd * x;
    GeodesicJet {
        point: Point::new(x, y, t),
        vel: [xd, yd, td],
        acc: [xdd, ydd, tdd],
    }
}

/// `γ(s)` and `γ'(s)` in frame coefficients.
pub fn exp_geodesic(arc: &GeodesicArc, s: f64) -> (Point, FrameVector) {
    let j = geodesic_jet(arc, s);
    (j.point, euclid_to_frame(j.point, j.vel))
}

/// Exponential map `exp_p(v)`.
pub fn exp_map(p: Point, v: FrameVector) -> Point {
    exp_geodesic(&GeodesicArc::new(p, v), 1.0).0
}

/// One-parameter family of geodesics `s ↦ exp_{α(ε)}(s U(ε))`.
pub trait GeodesicFamily {
    fn base(&self, eps: f64) -> Result<Point>;
    fn velocity(&self, eps: f64) -> Result<FrameVector>;

    fn arc(&self, eps: f64) -> Result<GeodesicArc> {
        Ok(GeodesicArc::new(self.base(eps)?, self.velocity(eps)?))
    }
}

/// Family built from closures, optionally restricted to an ε-interval.
pub struct FnFamily<A, U> {
    pub alpha: A,
    pub u: U,
    pub domain: Option<(f64, f64)>,
}

impl<A, U> FnFamily<A, U>
where
    A: Fn(f64) -> Point,
    U: Fn(f64) -> FrameVector,
{
    pub fn new(alpha: A, u: U) -> Self {
        Self { alpha, u, domain: None }
    }

    pub fn with_domain(mut self, lo: f64, hi: f64) -> Self {
        self.domain = Some((lo, hi));
        self
    }

    fn check(&self, eps: f64) -> Result<()> {
        if let Some((lo, hi)) = self.domain {
            if !(lo..=hi).contains(&eps) {
                return Err(Error::NonFinite("geodesic family evaluated outside its ε-domain"));
            }
        }
        Ok(())
    }
}

impl<A, U> GeodesicFamily for FnFamily<A, U>
where
    A: Fn(f64) -> Point,
    U: Fn(f64) -> FrameVector,
{
    fn base(&self, eps: f64) -> Result<Point> {
        self.check(eps)?;
        let p = (self.alpha)(eps);
        if p.is_finite() {
            Ok(p)
        } else {
            Err(Error::NonFinite("family base curve"))
        }
    }

    fn velocity(&self, eps: f64) -> Result<FrameVector> {
        self.check(eps)?;
        let v = (self.u)(eps);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite("family velocity"))
        }
    }
}

/// Rulings `s ↦ (s sin Rε, s cos Rε, ε/R)` of the helicoid of parameter R.
pub fn helicoid_ruling_family(r: f64) -> FnFamily<impl Fn(f64) -> Point, impl Fn(f64) -> FrameVector> {
    FnFamily::new(
        move |e: f64| Point::new(0.0, 0.0, e / r),
        move |e: f64| FrameVector::new((r * e).sin(), (r * e).cos(), 0.0),
    )
}

/// Variation field of a geodesic family with its covariant s-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiSample {
    pub point: Point,
    pub gamma_vel: FrameVector,
    pub v: FrameVector,
    pub v_prime: FrameVector,
    pub v_second: FrameVector,
}

/// ε-stencil used for all Jacobi fields.
pub const JACOBI_EPS_STEP: f64 = 1e-5;

fn jet_array(fam: &dyn GeodesicFamily, eps: f64, s: f64) -> Result<[f64; 9]> {
    let j = geodesic_jet(&fam.arc(eps)?, s);
    let p = j.point;
    Ok([p.x, p.y, p.t, j.vel[0], j.vel[1], j.vel[2], j.acc[0], j.acc[1], j.acc[2]])
}

/// `V = ∂_ε exp_{α(ε)}(s U(ε))` at `(eps, s)` with `V' = D_{γ'}V` and `V''`.
///
/// The s-derivatives of the closed-form flow are analytic, so only the
/// ε-derivative is a finite difference.
pub fn jacobi_field(fam: &dyn GeodesicFamily, eps: f64, s: f64) -> Result<JacobiSample> {
    let spec = DiffSpec { step: JACOBI_EPS_STEP, richardson_levels: 1 };
    let d = central_diff_n(|e| jet_array(fam, e, s), eps, &spec, 1)?;
    let j = geodesic_jet(&fam.arc(eps)?, s);
    let (x, y) = (j.point.x, j.point.y);
    let [xd, yd, _] = j.vel;
    let [xdd, ydd, tdd] = j.acc;
    let (v, vd, vdd) = ([d[0], d[1], d[2]], [d[3], d[4], d[5]], [d[6], d[7], d[8]]);

    // s-derivatives of the frame coefficients (e1, e2, e3 − e1 y + e2 x)
    let vf = euclid_to_frame(j.point, v);
    let dvf = FrameVector::new(vd[0], vd[1], vd[2] - vd[0] * y - v[0] * yd + vd[1] * x + v[1] * xd);
    let ddvf = FrameVector::new(
        vdd[0],
        vdd[1],
        vdd[2] - vdd[0] * y - 2.0 * vd[0] * yd - v[0] * ydd + vdd[1] * x + 2.0 * vd[1] * xd + v[1] * xdd,
    );
    let gv = euclid_to_frame(j.point, j.vel);
    let dgv = FrameVector::new(xdd, ydd, tdd - xdd * y + ydd * x);

    let v_prime = dvf + christoffel(gv, vf);
    let dv_prime = ddvf + christoffel(dgv, vf) + christoffel(gv, dvf);
    let v_second = dv_prime + christoffel(gv, v_prime);
    let out = JacobiSample {
        point: j.point,
        gamma_vel: gv,
        v: vf,
        v_prime,
        v_second,
    };
    if out.v.is_finite() && out.v_prime.is_finite() && out.v_second.is_finite() {
        Ok(out)
    } else {
        Err(Error::NonFinite("Jacobi field"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiResidual {
    /// `|V'' + R(γ', V)γ'|`.
    pub ode: f64,
    /// `|V'' − 3⟨V,Jγ'⟩Jγ' + |γ'|²⟨V,T⟩T|`, reported for horizontal velocities.
    pub horizontal: Option<f64>,
}

pub fn jacobi_residual(sample: &JacobiSample, gamma_vel: FrameVector) -> JacobiResidual {
    let ode = (sample.v_second + curvature_r(gamma_vel, sample.v, gamma_vel)).norm();
    let horizontal = gamma_vel.is_horizontal(1e-12).then(|| {
        let jg = jop(gamma_vel);
        let r = sample.v_second - 3.0 * sample.v.dot(&jg) * jg
            + gamma_vel.dot(&gamma_vel) * sample.v.c * FrameVector::T;
        r.norm()
    });
    JacobiResidual { ode, horizontal }
}

/// `|∂_s V − ∂_ε γ'|` in Euclidean components, with `∂_s V` taken by finite
/// differences in s of the ε-difference field. Zero when `[γ', V] = 0`.
pub fn jacobi_commutator_residual(fam: &dyn GeodesicFamily, eps: f64, s: f64) -> Result<f64> {
    let espec = DiffSpec { step: JACOBI_EPS_STEP, richardson_levels: 1 };
    let v_euclid = |ss: f64| -> Result<[f64; 3]> {
        let d = central_diff_n(
            |e| {
                let j = geodesic_jet(&fam.arc(e)?, ss);
                Ok(j.point.to_array())
            },
            eps,
            &espec,
            1,
        )?;
        Ok(d)
    };
    let ds_v = central_diff_n(v_euclid, s, &DiffSpec { step: 1e-3, richardson_levels: 2 }, 1)?;
    let de_vel = central_diff_n(|e| Ok(geodesic_jet(&fam.arc(e)?, s).vel), eps, &espec, 1)?;
    Ok(((ds_v[0] - de_vel[0]).powi(2) + (ds_v[1] - de_vel[1]).powi(2) + (ds_v[2] - de_vel[2]).powi(2)).sqrt())
}

/// Frame coefficients of the Euclidean velocity, a convenience for checks.
pub fn velocity_frame(p: Point, e: [f64; 3]) -> FrameVector {
    euclid_to_frame(p, e)
}

/// Euclidean components of a frame vector, a convenience for checks.
pub fn velocity_euclid(p: Point, v: FrameVector) -> [f64; 3] {
    frame_to_euclid(p, v)
}
