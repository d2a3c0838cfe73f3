//! Group law, left-invariant frame and the symmetries of H¹.

use std::ops::{Add, Mul, Neg, Sub};

/// A point `[z, t]` with `z = x + iy`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0, t: 0.0 };

    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        Self { x, y, t }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.t.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.t]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// Euclidean distance in coordinates (used only by geometric test oracles).
    pub fn euclid_dist(&self, o: &Point) -> f64 {
        ((self.x - o.x).powi(2) + (self.y - o.y).powi(2) + (self.t - o.t).powi(2)).sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.euclid_dist(&Point::ORIGIN)
    }
}

/// Group product `[z+z', t+t'+Im(z·conj z')]`.
pub fn group_mul(p: Point, q: Point) -> Point {
    Point::new(p.x + q.x, p.y + q.y, p.t + q.t + (p.y * q.x - p.x * q.y))
}

pub fn group_inv(p: Point) -> Point {
    Point::new(-p.x, -p.y, -p.t)
}

/// Dilation `(e^λ x, e^λ y, e^{2λ} t)`.
pub fn dilate(lambda: f64, p: Point) -> Point {
    let e = lambda.exp();
    Point::new(e * p.x, e * p.y, e * e * p.t)
}

/// Rotation of the `(x, y)` plane about the t-axis; a horizontal isometry.
pub fn rotate_z(theta: f64, p: Point) -> Point {
    let (s, c) = theta.sin_cos();
    Point::new(c * p.x - s * p.y, s * p.x + c * p.y, p.t)
}

/// Tangent vector written in the frame `{X, Y, T}`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrameVector {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl FrameVector {
    pub const ZERO: FrameVector = FrameVector { a: 0.0, b: 0.0, c: 0.0 };
    pub const X: FrameVector = FrameVector { a: 1.0, b: 0.0, c: 0.0 };
    pub const Y: FrameVector = FrameVector { a: 0.0, b: 1.0, c: 0.0 };
    pub const T: FrameVector = FrameVector { a: 0.0, b: 0.0, c: 1.0 };

    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn dot(&self, o: &FrameVector) -> f64 {
        self.a * o.a + self.b * o.b + self.c * o.c
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(&self) -> FrameVector {
        *self * (1.0 / self.norm())
    }

    /// Horizontal projection: drop the T-coefficient.
    pub fn horizontal(&self) -> FrameVector {
        FrameVector::new(self.a, self.b, 0.0)
    }

    pub fn is_horizontal(&self, tol: f64) -> bool {
        self.c.abs() <= tol
    }

    /// Right-handed cross product in the orthonormal frame (X×Y = T).
    pub fn cross(&self, o: &FrameVector) -> FrameVector {
        FrameVector::new(
            self.b * o.c - self.c * o.b,
            self.c * o.a - self.a * o.c,
            self.a * o.b - self.b * o.a,
        )
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite()
    }
}

impl Add for FrameVector {
    type Output = FrameVector;
    fn add(self, o: FrameVector) -> FrameVector {
        FrameVector::new(self.a + o.a, self.b + o.b, self.c + o.c)
    }
}

impl Sub for FrameVector {
    type Output = FrameVector;
    fn sub(self, o: FrameVector) -> FrameVector {
        FrameVector::new(self.a - o.a, self.b - o.b, self.c - o.c)
    }
}

impl Neg for FrameVector {
    type Output = FrameVector;
    fn neg(self) -> FrameVector {
        FrameVector::new(-self.a, -self.b, -self.c)
    }
}

impl Mul<FrameVector> for f64 {
    type Output = FrameVector;
    fn mul(self, v: FrameVector) -> FrameVector {
        FrameVector::new(self * v.a, self * v.b, self * v.c)
    }
}

impl Mul<f64> for FrameVector {
    type Output = FrameVector;
    fn mul(self, s: f64) -> FrameVector {
        s * self
    }
}

/// `J(a, b, c) = (−b, a, 0)`, i.e. `J(U) = D_U T`.
pub fn jop(v: FrameVector) -> FrameVector {
    FrameVector::new(-v.b, v.a, 0.0)
}

/// Euclidean coordinate vectors of X, Y, T at `p`.
pub fn frame_at(p: Point) -> [[f64; 3]; 3] {
    [[1.0, 0.0, p.y], [0.0, 1.0, -p.x], [0.0, 0.0, 1.0]]
}

/// Frame coefficients of the Euclidean vector `e` based at `p`.
pub fn euclid_to_frame(p: Point, e: [f64; 3]) -> FrameVector {
    FrameVector::new(e[0], e[1], e[2] - e[0] * p.y + e[1] * p.x)
}

/// Euclidean components of the frame vector `v` based at `p`.
pub fn frame_to_euclid(p: Point, v: FrameVector) -> [f64; 3] {
    [v.a, v.b, v.a * p.y - v.b * p.x + v.c]
}

/// Differential of the left translation `q ↦ p·q`, applied to a Euclidean vector.
pub fn left_translate_vector(p: Point, e: [f64; 3]) -> [f64; 3] {
    [e[0], e[1], e[2] + p.y * e[0] - p.x * e[1]]
}
