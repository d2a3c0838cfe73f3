use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::Rect;

/// The symmetric cutoff `φ_kδ`: 1 on `[−k, k]`, linear down to 0 on
/// `[k, k+δ]`, 0 beyond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiKDelta {
    k: f64,
    delta: f64,
}

impl PhiKDelta {
    pub fn new(k: f64, delta: f64) -> Result<Self> {
        if !(k > 0.5 && k.is_finite()) {
            return Err(Error::Domain(format!("phi_k,delta needs k > 1/2, got {k}")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Domain(format!("phi_k,delta needs delta > 0, got {delta}")));
        }
        Ok(Self { k, delta })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn value(&self, x: f64) -> f64 {
        let a = x.abs();
        if a <= self.k {
            1.0
        } else if a < self.k + self.delta {
            (self.k + self.delta - a) / self.delta
        } else {
            0.0
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let a = x.abs();
        if a > self.k && a < self.k + self.delta {
            -x.signum() / self.delta
        } else {
            0.0
        }
    }
}

/// One-variable factor of a separable test function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `cos²(π(x−c)/(2w))` on `|x−c| < w`; C¹ with compact support.
    Bump { center: f64, half_width: f64 },
    /// `cos(πx/(2w))` on `|x| < w`.
    Cosine { half_width: f64 },
    Ramp(PhiKDelta),
    Const(f64),
}

impl Profile {
    pub fn bump(center: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite() && center.is_finite()) {
            return Err(Error::InvalidSpec(format!("bump needs a positive finite width, got {half_width}")));
        }
        Ok(Profile::Bump { center, half_width })
    }

    pub fn cosine(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidSpec(format!("cosine profile needs a positive width, got {half_width}")));
        }
        Ok(Profile::Cosine { half_width })
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Profile::Bump { center, half_width } => {
                let z = (x - center) / half_width;
                if z.abs() < 1.0 {
                    (0.5 * PI * z).cos().powi(2)
                } else {
                    0.0
                }
            }
            Profile::Cosine { half_width } => {
                let z = x / half_width;
                if z.abs() < 1.0 {
                    (0.5 * PI * z).cos()
                } else {
                    0.0
                }
            }
            Profile::Ramp(p) => p.value(x),
            Profile::Const(c) => c,
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match *self {
            Profile::Bump { center, half_width } => {
                let z = (x - center) / half_width;
                if z.abs() < 1.0 {
                    -0.5 * PI / half_width * (PI * z).sin()
                } else {
                    0.0
                }
            }
            Profile::Cosine { half_width } => {
                let z = x / half_width;
                if z.abs() < 1.0 {
                    -0.5 * PI / half_width * (0.5 * PI * z).sin()
                } else {
                    0.0
                }
            }
            Profile::Ramp(p) => p.deriv(x),
            Profile::Const(_) => 0.0,
        }
    }

    /// Closed support; unbounded for nonzero constants.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Profile::Bump { center, half_width } => (center - half_width, center + half_width),
            Profile::Cosine { half_width } => (-half_width, half_width),
            Profile::Ramp(p) => (-(p.k + p.delta), p.k + p.delta),
            Profile::Const(c) if c == 0.0 => (0.0, 0.0),
            Profile::Const(_) => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Points where the profile or its derivative is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match *self {
            Profile::Bump { center, half_width } => vec![center - half_width, center + half_width],
            Profile::Cosine { half_width } => vec![-half_width, half_width],
            Profile::Ramp(p) => vec![-(p.k + p.delta), -p.k, p.k, p.k + p.delta],
            Profile::Const(_) => Vec::new(),
        }
    }

    /// `x ↦ self(x / k)`.
    pub fn stretched(&self, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidSpec(format!("stretch factor must be positive, got {k}")));
        }
        Ok(match *self {
            Profile::Bump { center, half_width } => Profile::Bump { center: center * k, half_width: half_width * k },
            Profile::Cosine { half_width } => Profile::Cosine { half_width: half_width * k },
            Profile::Ramp(p) => Profile::Ramp(PhiKDelta { k: p.k * k, delta: p.delta * k }),
            c @ Profile::Const(_) => c,
        })
    }

    /// Whether the profile is constant on `[a, b]`.
    pub fn is_constant_on(&self, a: f64, b: f64) -> bool {
        let outside = |lo: f64, hi: f64| b <= lo || a >= hi;
        match *self {
            Profile::Bump { center, half_width } => outside(center - half_width, center + half_width),
            Profile::Cosine { half_width } => outside(-half_width, half_width),
            Profile::Ramp(p) => {
                let m = p.k + p.delta;
                (a >= -p.k && b <= p.k) || b <= -m || a >= m
            }
            Profile::Const(_) => true,
        }
    }
}

/// Compactly supported function on a chart domain with its coordinate gradient.
pub trait TestFunction: Sync {
    fn value(&self, u1: f64, u2: f64) -> f64;
    fn grad(&self, u1: f64, u2: f64) -> (f64, f64);
    /// Rectangle outside of which the function vanishes.
    fn support(&self) -> Rect;
    /// Coordinate lines (u1 values, u2 values) where the gradient may jump.
    fn breaks(&self) -> (Vec<f64>, Vec<f64>) {
        (Vec::new(), Vec::new())
    }
}

/// `u(u₁, u₂) = f(u₁)·g(u₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separable {
    pub f: Profile,
    pub g: Profile,
}

impl Separable {
    pub fn new(f: Profile, g: Profile) -> Self {
        Self { f, g }
    }

    pub fn zero() -> Self {
        Self { f: Profile::Const(0.0), g: Profile::Const(0.0) }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.f, Profile::Const(c) if c == 0.0) || matches!(self.g, Profile::Const(c) if c == 0.0)
    }
}

impl TestFunction for Separable {
    fn value(&self, u1: f64, u2: f64) -> f64 {
        self.f.value(u1) * self.g.value(u2)
    }
    fn grad(&self, u1: f64, u2: f64) -> (f64, f64) {
        (self.f.deriv(u1) * self.g.value(u2), self.f.value(u1) * self.g.deriv(u2))
    }
    fn support(&self) -> Rect {
        if self.is_zero() {
            return Rect::new(0.0, 0.0, 0.0, 0.0);
        }
        let (a, b) = self.f.support();
        let (c, d) = self.g.support();
        Rect::new(a, b, c, d)
    }
    fn breaks(&self) -> (Vec<f64>, Vec<f64>) {
        (self.f.kinks(), self.g.kinks())
    }
}

/// Test function given by a closure, differentiated by central differences.
pub struct FnTestFunction<F> {
    f: F,
    support: Rect,
    step: f64,
}

impl<F: Fn(f64, f64) -> f64 + Sync> FnTestFunction<F> {
    /// `f` must vanish outside `support`; this is the caller's contract.
    pub fn new(f: F, support: Rect) -> Self {
        Self { f, support, step: 1e-5 }
    }
}

impl<F: Fn(f64, f64) -> f64 + Sync> TestFunction for FnTestFunction<F> {
    fn value(&self, u1: f64, u2: f64) -> f64 {
        (self.f)(u1, u2)
    }
    fn grad(&self, u1: f64, u2: f64) -> (f64, f64) {
        let h = self.step;
        let d = |a: f64, b: f64, c: f64, e: f64| ((self.f)(a, b) - (self.f)(c, e)) / (2.0 * h);
        (d(u1 + h, u2, u1 - h, u2), d(u1, u2 + h, u1, u2 - h))
    }
    fn support(&self) -> Rect {
        self.support
    }
}

pub(crate) fn is_empty(r: &Rect) -> bool {
    !(r.x0 < r.x1 && r.y0 < r.y1)
}

/// Intersection of two rectangles (possibly empty).
pub(crate) fn intersect(a: &Rect, b: &Rect) -> Rect {
    Rect::new(a.x0.max(b.x0), a.x1.min(b.x1), a.y0.max(b.y0), a.y1.min(b.y1))
}

/// Sorted breakpoints of `[lo, hi]` including the interior entries of `extra`.
pub(crate) fn breakpoints(lo: f64, hi: f64, extra: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut b = vec![lo, hi];
    b.extend(extra.into_iter().filter(|v| *v > lo && *v < hi));
    b.sort_by(f64::total_cmp);
    b.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
    b
}
