//! Levi-Civita connection, curvature and Ricci tensor of the left-invariant
//! metric. On frame coefficients the connection is a constant bilinear map.

use crate::error::{Error, Result};
use crate::group::{frame_to_euclid, FrameVector, Point};
use crate::numerics::{central_diff_n, DiffSpec};

/// `D_u v` for constant-coefficient fields `u`, `v`:
/// `D_X Y = −T, D_X T = Y, D_Y X = T, D_Y T = −X, D_T X = Y, D_T Y = −X`.
pub fn christoffel(u: FrameVector, v: FrameVector) -> FrameVector {
    FrameVector::new(
        -(u.b * v.c + u.c * v.b),
        u.a * v.c + u.c * v.a,
        u.b * v.a - u.a * v.b,
    )
}

/// Bracket of left-invariant fields: `[X,Y] = −2T`, `[X,T] = [Y,T] = 0`.
pub fn bracket_const(u: FrameVector, v: FrameVector) -> FrameVector {
    christoffel(u, v) - christoffel(v, u)
}

/// A vector field given by its frame coefficients.
pub trait FrameField {
    fn coeffs(&self, p: Point) -> FrameVector;

    /// Partials of the coefficients with respect to Euclidean x, y, t.
    /// `None` selects the finite-difference fallback.
    fn partials(&self, _p: Point) -> Option<[FrameVector; 3]> {
        None
    }
}

/// Constant-coefficient (left-invariant) field.
#[derive(Debug, Clone, Copy)]
pub struct ConstField(pub FrameVector);

impl FrameField for ConstField {
    fn coeffs(&self, _p: Point) -> FrameVector {
        self.0
    }
    fn partials(&self, _p: Point) -> Option<[FrameVector; 3]> {
        Some([FrameVector::ZERO; 3])
    }
}

/// Field defined by a closure; partials come from finite differences.
pub struct FnField<F>(pub F);

impl<F: Fn(Point) -> FrameVector> FrameField for FnField<F> {
    fn coeffs(&self, p: Point) -> FrameVector {
        (self.0)(p)
    }
}

/// Central differences, step `1e-5·max(1, |p|)`, one Richardson level.
pub fn fd_partials<F: FrameField + ?Sized>(field: &F, p: Point) -> Result<[FrameVector; 3]> {
    let spec = DiffSpec {
        step: 1e-5 * p.norm().max(1.0),
        richardson_levels: 1,
    };
    let mut out = [FrameVector::ZERO; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let d = central_diff_n(
            |s| {
                let mut q = p.to_array();
                q[k] += s;
                Ok(field.coeffs(Point::from_array(q)).to_array())
            },
            0.0,
            &spec,
            1,
        )?;
        *slot = FrameVector::from_array(d);
    }
    Ok(out)
}

fn partials_of<F: FrameField + ?Sized>(field: &F, p: Point) -> Result<[FrameVector; 3]> {
    let d = match field.partials(p) {
        Some(d) => d,
        None => fd_partials(field, p)?,
    };
    if d.iter().all(|v| v.is_finite()) {
        Ok(d)
    } else {
        Err(Error::NonFinite("coefficient derivatives"))
    }
}

/// Derivative of the coefficient triple of `v` in the direction `u` at `p`.
pub fn directional_coeff_derivative<V: FrameField + ?Sized>(u: FrameVector, v: &V, p: Point) -> Result<FrameVector> {
    let e = frame_to_euclid(p, u);
    let d = partials_of(v, p)?;
    Ok(e[0] * d[0] + e[1] * d[1] + e[2] * d[2])
}

/// `D_U V` at `p`.
pub fn covariant_derivative<U, V>(u: &U, v: &V, p: Point) -> Result<FrameVector>
where
    U: FrameField + ?Sized,
    V: FrameField + ?Sized,
{
    let uv = u.coeffs(p);
    let vv = v.coeffs(p);
    if !(uv.is_finite() && vv.is_finite()) {
        return Err(Error::NonFinite("field coefficients"));
    }
    Ok(directional_coeff_derivative(uv, v, p)? + christoffel(uv, vv))
}

/// Lie bracket computed from Euclidean components and their finite-difference
/// Jacobians; independent of the connection, so usable as a torsion oracle.
pub fn lie_bracket_euclid<U, V>(u: &U, v: &V, p: Point) -> Result<FrameVector>
where
    U: FrameField + ?Sized,
    V: FrameField + ?Sized,
{
    let ue = frame_to_euclid(p, u.coeffs(p));
    let ve = frame_to_euclid(p, v.coeffs(p));
    let spec = DiffSpec {
        step: 1e-5 * p.norm().max(1.0),
        richardson_levels: 1,
    };
    // directional derivative of the Euclidean components of `w` along `dir`
    let along = |w: &dyn Fn(Point) -> [f64; 3], dir: [f64; 3]| {
        central_diff_n(
            |s| Ok(w(Point::new(p.x + s * dir[0], p.y + s * dir[1], p.t + s * dir[2]))),
            0.0,
            &spec,
            1,
        )
    };
    let ve_f = |q: Point| frame_to_euclid(q, v.coeffs(q));
    let ue_f = |q: Point| frame_to_euclid(q, u.coeffs(q));
    let dv = along(&ve_f, ue)?;
    let du = along(&ue_f, ve)?;
    let e = [dv[0] - du[0], dv[1] - du[1], dv[2] - du[2]];
    Ok(crate::group::euclid_to_frame(p, e))
}

const E: [FrameVector; 3] = [FrameVector::X, FrameVector::Y, FrameVector::T];

/// `R(E_i, E_j) E_k` from the table, i < j.
fn table(i: usize, j: usize, k: usize) -> FrameVector {
    use FrameVector as F;
    match (i, j, k) {
        (0, 1, 0) => -3.0 * F::Y,
        (0, 1, 1) => 3.0 * F::X,
        (0, 2, 0) => F::T,
        (0, 2, 2) => -F::X,
        (1, 2, 1) => F::T,
        (1, 2, 2) => -F::Y,
        _ => F::ZERO,
    }
}

/// Curvature `R(u, v) w` (convention `R(U,V)W = D_V D_U W − D_U D_V W + D_{[U,V]} W`).
pub fn curvature_r(u: FrameVector, v: FrameVector, w: FrameVector) -> FrameVector {
    let (uc, vc, wc) = (u.to_array(), v.to_array(), w.to_array());
    let mut out = FrameVector::ZERO;
    for i in 0..3 {
        for j in (i + 1)..3 {
            let coef = uc[i] * vc[j] - uc[j] * vc[i];
            if coef == 0.0 {
                continue;
            }
            for (k, wk) in wc.iter().enumerate() {
                if *wk != 0.0 {
                    out = out + (coef * wk) * table(i, j, k);
                }
            }
        }
    }
    out
}

/// Ricci tensor: `Ric(X,X) = Ric(Y,Y) = −2`, `Ric(T,T) = 2`, off-diagonal zero.
pub fn ricci(u: FrameVector, v: FrameVector) -> f64 {
    -2.0 * u.a * v.a - 2.0 * u.b * v.b + 2.0 * u.c * v.c
}

/// Ricci tensor as the trace `Σ_k ⟨R(u, E_k) v, E_k⟩` of the curvature.
pub fn ricci_trace(u: FrameVector, v: FrameVector) -> f64 {
    E.iter().map(|e| curvature_r(u, *e, v).dot(e)).sum()
}
