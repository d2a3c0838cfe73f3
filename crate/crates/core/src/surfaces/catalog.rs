use super::{Chart, ChartJet};
use crate::error::{Error, Result};
use crate::group::Point;
use crate::numerics::Rect;

const ZERO: [f64; 3] = [0.0; 3];

fn in_domain(d: &Rect, u1: f64, u2: f64) -> Result<()> {
    if !(u1.is_finite() && u2.is_finite()) {
        return Err(Error::NonFinite("chart parameters"));
    }
    // the stencils of derivative oracles may step slightly outside
    let pad1 = 1e-2 * (d.x1 - d.x0).abs().max(1.0);
    let pad2 = 1e-2 * (d.y1 - d.y0).abs().max(1.0);
    if u1 < d.x0 - pad1 || u1 > d.x1 + pad1 || u2 < d.y0 - pad2 || u2 > d.y1 + pad2 {
        return Err(Error::Domain(format!("({u1}, {u2}) outside chart domain")));
    }
    Ok(())
}

/// Euclidean vertical plane through `(x0, y0)` containing the horizontal
/// direction `(cos φ, sin φ)`: `F(r, t) = (x0 + r cos φ, y0 + r sin φ, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalPlane {
    pub x0: f64,
    pub y0: f64,
    pub phi: f64,
    pub domain: Rect,
}

impl VerticalPlane {
    /// The plane x = 0 charted by (y, t).
    pub fn x_equals_zero() -> Self {
        Self::new(0.0, 0.0, std::f64::consts::FRAC_PI_2)
    }

    pub fn new(x0: f64, y0: f64, phi: f64) -> Self {
        Self { x0, y0, phi, domain: Rect::new(-5.0, 5.0, -5.0, 5.0) }
    }

    pub fn with_domain(mut self, d: Rect) -> Self {
        self.domain = d;
        self
    }
}

impl Chart for VerticalPlane {
    fn domain(&self) -> Rect {
        self.domain
    }
    fn jet(&self, u1: f64, u2: f64) -> Result<ChartJet> {
        in_domain(&self.domain, u1, u2)?;
        let (s, c) = self.phi.sin_cos();
        Ok(ChartJet {
            p: Point::new(self.x0 + u1 * c, self.y0 + u1 * s, u2),
            f1: [c, s, 0.0],
            f2: [0.0, 0.0, 1.0],
            f11: ZERO,
            f12: ZERO,
            f22: ZERO,
        })
    }
    fn is_minimal(&self) -> bool {
        true
    }
    fn label(&self) -> String {
        format!("vertical_plane x0={} y0={} phi={}", self.x0, self.y0, self.phi)
    }
}

/// Graph `t = a x + b y + c`; its only singular point is `(−b, a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub domain: Rect,
}

impl Plane {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c, domain: Rect::new(-5.0, 5.0, -5.0, 5.0) }
    }

    pub fn with_domain(mut self, d: Rect) -> Self {
        self.domain = d;
        self
    }
}

impl Chart for Plane {
    fn domain(&self) -> Rect {
        self.domain
    }
    fn jet(&self, x: f64, y: f64) -> Result<ChartJet> {
        in_domain(&self.domain, x, y)?;
        Ok(ChartJet {
            p: Point::new(x, y, self.a * x + self.b * y + self.c),
            f1: [1.0, 0.0, self.a],
            f2: [0.0, 1.0, self.b],
            f11: ZERO,
            f12: ZERO,
            f22: ZERO,
        })
    }
    fn is_minimal(&self) -> bool {
        true
    }
    fn label(&self) -> String {
        format!("plane a={} b={} c={}", self.a, self.b, self.c)
    }
}

/// Hyperbolic paraboloid `t = xy`, charted by `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Paraboloid {
    pub domain: Rect,
}

impl Default for Paraboloid {
    fn default() -> Self {
        Self { domain: Rect::new(-2.0, 2.0, -2.0, 2.0) }
    }
}

impl Chart for Paraboloid {
    fn domain(&self) -> Rect {
        self.domain
    }
    fn jet(&self, x: f64, y: f64) -> Result<ChartJet> {
        in_domain(&self.domain, x, y)?;
        Ok(ChartJet {
            p: Point::new(x, y, x * y),
            f1: [1.0, 0.0, y],
            f2: [0.0, 1.0, x],
            f11: ZERO,
            f12: [0.0, 0.0, 1.0],
            f22: ZERO,
        })
    }
    fn is_minimal(&self) -> bool {
        true
    }
    fn kinks_u1(&self) -> Vec<f64> {
        vec![0.0]
    }
    fn label(&self) -> String {
        "paraboloid t=xy".into()
    }
}

/// Left-handed minimal helicoid `H_R`, charted by `(s, ε)`:
/// `F(s, ε) = (s sin Rε, s cos Rε, ε/R)`. Singular helices at `s = ±1/R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Helicoid {
    pub r: f64,
    pub domain: Rect,
}

impl Helicoid {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("helicoid parameter must be positive (got {r})")));
        }
        Ok(Self { r, domain: Rect::new(-3.0 / r, 3.0 / r, -3.2, 3.2) })
    }

    pub fn with_domain(mut self, d: Rect) -> Self {
        self.domain = d;
        self
    }

    /// `f(s) = 1/R − R s²`.
    pub fn f(&self, s: f64) -> f64 {
        1.0 / self.r - self.r * s * s
    }

    pub fn d(&self, s: f64) -> f64 {
        let f = self.f(s);
        f * f + self.r * self.r * s * s
    }

    pub fn nh_closed(&self, s: f64) -> f64 {
        self.f(s).abs() / self.d(s).sqrt()
    }

    pub fn nt_closed(&self, s: f64) -> f64 {
        -self.r * s / self.d(s).sqrt()
    }

    pub fn bzs_closed(&self, s: f64) -> f64 {
        let f = self.f(s);
        (2.0 * f * f - self.r * f) / self.d(s) - 1.0
    }

    pub fn q_closed(&self, s: f64) -> f64 {
        let f = self.f(s);
        let d = self.d(s);
        (self.r * self.r - 4.0) * f * f / (d * d)
    }

    /// `L(|N_h|) = 4(⟨B(Z),S⟩/|N_h|² − 1)`, which simplifies to `−4/f²`.
    pub fn l_nh_closed_form(&self, s: f64) -> f64 {
        let f = self.f(s);
        -4.0 / (f * f)
    }
}

impl Chart for Helicoid {
    fn domain(&self) -> Rect {
        self.domain
    }
    fn jet(&self, s: f64, e: f64) -> Result<ChartJet> {
        in_domain(&self.domain, s, e)?;
        let r = self.r;
        let (sn, cs) = (r * e).sin_cos();
        Ok(ChartJet {
            p: Point::new(s * sn, s * cs, e / r),
            f1: [sn, cs, 0.0],
            f2: [r * s * cs, -r * s * sn, 1.0 / r],
            f11: ZERO,
            f12: [r * cs, -r * sn, 0.0],
            f22: [-r * r * s * sn, -r * r * s * cs, 0.0],
        })
    }
    fn is_minimal(&self) -> bool {
        true
    }
    fn kinks_u1(&self) -> Vec<f64> {
        vec![-1.0 / self.r, 1.0 / self.r]
    }
    fn label(&self) -> String {
        format!("helicoid R={}", self.r)
    }
}

/// Sheet of the catenoid `t² = λ²(x²+y²−λ²)`, charted by `(r, θ)` with `r > λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Catenoid {
    pub lambda: f64,
    /// +1 for the sheet t > 0, −1 for t < 0.
    pub sheet: f64,
    pub domain: Rect,
}

impl Catenoid {
    pub fn new(lambda: f64, sheet: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("catenoid parameter must be positive (got {lambda})")));
        }
        if sheet != 1.0 && sheet != -1.0 {
            return Err(Error::Domain("catenoid sheet must be +1 or -1".into()));
        }
        let l = lambda;
        Ok(Self { lambda, sheet, domain: Rect::new(1.05 * l, 6.0 * l, -std::f64::consts::PI, std::f64::consts::PI) })
    }

    pub fn with_domain(mut self, d: Rect) -> Self {
        self.domain = d;
        self
    }
}

impl Chart for Catenoid {
    fn domain(&self) -> Rect {
        self.domain
    }
    fn jet(&self, r: f64, th: f64) -> Result<ChartJet> {
        if !(r.is_finite() && th.is_finite()) {
            return Err(Error::NonFinite("chart parameters"));
        }
        let l = self.lambda;
        if r <= l {
            return Err(Error::Domain(format!("catenoid chart needs r > lambda (got r={r})")));
        }
        let root = (r * r - l * l).sqrt();
        let w = self.sheet * l * root;
        let w1 = self.sheet * l * r / root;
        let w2 = -self.sheet * l * l * l / (root * root * root);
        let (sn, cs) = th.sin_cos();
        Ok(ChartJet {
            p: Point::new(r * cs, r * sn, w),
            f1: [cs, sn, w1],
            f2: [-r * sn, r * cs, 0.0],
            f11: [0.0, 0.0, w2],
            f12: [-sn, cs, 0.0],
            f22: [-r * cs, -r * sn, 0.0],
        })
    }
    fn is_minimal(&self) -> bool {
        true
    }
    fn label(&self) -> String {
        format!("catenoid lambda={} sheet={}", self.lambda, self.sheet)
    }
}

/// Image of a chart under an affine map `q ↦ A q + b` of the coordinates.
/// Dilations, rotations about the t-axis and left translations are all of
/// this form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineImage<C> {
    pub inner: C,
    pub a: [[f64; 3]; 3],
    pub b: [f64; 3],
    /// Name of the map, for labels.
    pub tag: &'static str,
}

impl<C: Chart> AffineImage<C> {
    pub fn dilation(inner: C, lambda: f64) -> Self {
        let e = lambda.exp();
        Self { inner, a: [[e, 0.0, 0.0], [0.0, e, 0.0], [0.0, 0.0, e * e]], b: [0.0; 3], tag: "dilation" }
    }

    pub fn rotation(inner: C, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { inner, a: [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]], b: [0.0; 3], tag: "rotation" }
    }

    pub fn left_translation(inner: C, p: Point) -> Self {
        Self {
            inner,
            a: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [p.y, -p.x, 1.0]],
            b: [p.x, p.y, p.t],
            tag: "left_translation",
        }
    }

    fn lin(&self, v: [f64; 3]) -> [f64; 3] {
        let a = &self.a;
        [
            a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
            a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
            a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2],
        ]
    }
}

impl<C: Chart> Chart for AffineImage<C> {
    fn domain(&self) -> Rect {
        self.inner.domain()
    }
    fn jet(&self, u1: f64, u2: f64) -> Result<ChartJet> {
        let j = self.inner.jet(u1, u2)?;
        let p = self.lin(j.p.to_array());
        Ok(ChartJet {
            p: Point::new(p[0] + self.b[0], p[1] + self.b[1], p[2] + self.b[2]),
            f1: self.lin(j.f1),
            f2: self.lin(j.f2),
            f11: self.lin(j.f11),
            f12: self.lin(j.f12),
            f22: self.lin(j.f22),
        })
    }
    fn orientation(&self) -> f64 {
        self.inner.orientation()
    }
    fn is_minimal(&self) -> bool {
        self.inner.is_minimal()
    }
    fn kinks_u1(&self) -> Vec<f64> {
        self.inner.kinks_u1()
    }
    fn kinks_u2(&self) -> Vec<f64> {
        self.inner.kinks_u2()
    }
    fn label(&self) -> String {
        format!("{} of {}", self.tag, self.inner.label())
    }
}
