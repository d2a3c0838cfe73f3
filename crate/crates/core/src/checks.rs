//! Named invariant checks grouped by suite. Each check computes a maximum
//! residual over a deterministic sample set and compares it with a
//! threshold, which may be overridden by check name or by group key.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::connection::{
    bracket_const, christoffel, covariant_derivative, curvature_r, directional_coeff_derivative,
    lie_bracket_euclid, ricci, ricci_trace, ConstField, FnField, FrameField,
};
use crate::error::{Error, Result};
use crate::geodesics::{
    exp_geodesic, helicoid_ruling_family, helpers_fgh, jacobi_commutator_residual, jacobi_field,
    jacobi_residual, FnFamily, GeodesicArc,
};
use crate::group::{
    frame_at, frame_to_euclid, group_mul, jop, left_translate_vector, FrameVector, Point,
};
use crate::numerics::{
    fit_quadratic, gauss_legendre_1d, integrate_2d, CompensatedSum, QuadratureSpec, Rect,
};
use crate::stability::{
    area_variation, index_form, index_form_nh_weighted, jacobi_vertical_quadratic, l_nh_closed, l_nh_of,
    operator_l, q_form_parts, s_derivative, z_covariant, z_derivative, FnTestFunction, Profile,
    Separable, SurfaceField, TestFunction,
};
use crate::surfaces::{
    area, normal_data, surface_frame, Catenoid, Chart, Helicoid, Paraboloid, VerticalPlane,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Core,
    Geodesics,
    Surfaces,
    Stability,
    Numerics,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Core, Suite::Geodesics, Suite::Surfaces, Suite::Stability, Suite::Numerics];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Geodesics => "geodesics",
            Suite::Surfaces => "surfaces",
            Suite::Stability => "stability",
            Suite::Numerics => "numerics",
        }
    }

    /// `"all"` expands to every suite.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        if s == "all" {
            return Ok(Self::ALL.to_vec());
        }
        Self::ALL
            .iter()
            .find(|x| x.name() == s)
            .map(|x| vec![*x])
            .ok_or_else(|| Error::InvalidSpec(format!("unknown suite '{s}'")))
    }
}

type Probe = Box<dyn Fn() -> Result<f64> + Send + Sync>;

struct Check {
    name: &'static str,
    label: &'static str,
    /// Shared override key for related checks.
    group: &'static str,
    threshold: f64,
    probe: Probe,
}

fn check(
    name: &'static str,
    label: &'static str,
    group: &'static str,
    threshold: f64,
    probe: impl Fn() -> Result<f64> + Send + Sync + 'static,
) -> Check {
    Check { name, label, group, threshold, probe: Box::new(probe) }
}

/// Threshold overrides keyed by check name or group key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tolerances {
    overrides: BTreeMap<String, f64>,
}

impl Tolerances {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an override after validating the key against every registered
    /// check and the value for positivity.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::InvalidSpec(format!("tolerance for '{key}' must be positive and finite")));
        }
        if !known_keys().iter().any(|k| k == key) {
            return Err(Error::InvalidSpec(format!("unknown tolerance key '{key}'")));
        }
        self.overrides.insert(key.to_string(), value);
        Ok(())
    }

    /// Parses `key=value`.
    pub fn set_from_str(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidSpec(format!("tolerance override '{kv}' is not key=value")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("tolerance value '{v}' is not a number")))?;
        self.set(k.trim(), v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.overrides.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.overrides.is_empty()
    }

    /// A name override wins over a group override.
    fn lookup(&self, c: &Check) -> Option<(String, f64)> {
        self.overrides
            .get(c.name)
            .map(|v| (c.name.to_string(), *v))
            .or_else(|| self.overrides.get(c.group).map(|v| (c.group.to_string(), *v)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    NonFinite,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::NonFinite => "NONFINITE",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub suite: Suite,
    pub name: String,
    pub label: String,
    pub residual: f64,
    pub threshold: f64,
    pub status: Status,
    /// Override key that replaced the default threshold.
    pub override_key: Option<String>,
    /// Error raised by the probe, if any.
    pub error: Option<String>,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<10} {:<34} {:<52} max_residual={:<10.3e} threshold={:<8.1e} {}",
            self.suite.name(),
            self.name,
            self.label,
            self.residual,
            self.threshold,
            self.status
        )?;
        if let Some(k) = &self.override_key {
            write!(f, " [override {k}]")?;
        }
        if let Some(e) = &self.error {
            write!(f, " ({e})")?;
        }
        Ok(())
    }
}

/// Every key accepted by [`Tolerances::set`].
pub fn known_keys() -> Vec<String> {
    let mut keys: Vec<String> = Suite::ALL
        .iter()
        .flat_map(|s| registry(*s))
        .flat_map(|c| [c.name.to_string(), c.group.to_string()])
        .collect();
    keys.sort();
    keys.dedup();
    keys
}

/// Names of the checks in a suite, in report order.
pub fn check_names(suite: Suite) -> Vec<&'static str> {
    registry(suite).iter().map(|c| c.name).collect()
}

pub fn run_suite(suite: Suite, tol: &Tolerances) -> Vec<CheckResult> {
    registry(suite)
        .into_iter()
        .map(|c| {
            let ov = tol.lookup(&c);
            let threshold = ov.as_ref().map_or(c.threshold, |o| o.1);
            let (residual, error) = match (c.probe)() {
                Ok(r) => (r, None),
                Err(e) => (f64::NAN, Some(e)),
            };
            let status = match &error {
                Some(Error::NonFinite(_)) => Status::NonFinite,
                Some(_) => Status::Fail,
                None if !residual.is_finite() => Status::NonFinite,
                None if residual <= threshold => Status::Pass,
                None => Status::Fail,
            };
            CheckResult {
                suite,
                name: c.name.to_string(),
                label: c.label.to_string(),
                residual,
                threshold,
                status,
                override_key: ov.map(|o| o.0),
                error: error.map(|e| e.to_string()),
            }
        })
        .collect()
}

fn registry(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::Core => core_checks(),
        Suite::Geodesics => geodesic_checks(),
        Suite::Surfaces => surface_checks(),
        Suite::Stability => stability_checks(),
        Suite::Numerics => numerics_checks(),
    }
}

// ---------------------------------------------------------------- helpers

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rand_point(r: &mut ChaCha8Rng, m: f64) -> Point {
    Point::new(r.gen_range(-m..m), r.gen_range(-m..m), r.gen_range(-m..m))
}

fn rand_vec(r: &mut ChaCha8Rng) -> FrameVector {
    FrameVector::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

/// Max of a residual over samples; a non-finite sample poisons the result.
fn max_of(vals: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut m = 0.0f64;
    for v in vals {
        let v = v?;
        if !v.is_finite() {
            return Ok(f64::NAN);
        }
        m = m.max(v);
    }
    Ok(m)
}

const FRAME: [FrameVector; 3] = [FrameVector::X, FrameVector::Y, FrameVector::T];

fn poly_field(seed: u64) -> impl Fn(Point) -> FrameVector + Send + Sync {
    let mut r = rng(seed);
    let c: Vec<f64> = (0..30).map(|_| r.gen_range(-1.0..1.0)).collect();
    move |p: Point| {
        let m = [1.0, p.x, p.y, p.t, p.x * p.y, p.x * p.x, p.y * p.t, p.t * p.t, p.x * p.t, p.y * p.y];
        let f = |o: usize| (0..10).map(|i| c[o + i] * m[i]).sum::<f64>();
        FrameVector::new(f(0), f(10), f(20))
    }
}

/// Flow of a left-invariant field: right multiplication by its exponential.
fn flow(v: FrameVector, tau: f64, p: Point) -> Point {
    group_mul(p, Point::new(tau * v.a, tau * v.b, tau * v.c))
}

/// Regular grid points (|N_h| ≥ `min_nh`) at cell midpoints of an n×n grid.
fn regular_grid<C: Chart + ?Sized>(c: &C, n: usize, min_nh: f64) -> Vec<(f64, f64)> {
    let d = c.domain();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let u = (
                d.x0 + (d.x1 - d.x0) * (i as f64 + 0.5) / n as f64,
                d.y0 + (d.y1 - d.y0) * (j as f64 + 0.5) / n as f64,
            );
            if normal_data(c, u).map_or(false, |nd| nd.nh_norm >= min_nh) {
                out.push(u);
            }
        }
    }
    out
}

fn random_regular<C: Chart + ?Sized>(c: &C, r: &mut ChaCha8Rng, n: usize, min_nh: f64) -> Vec<(f64, f64)> {
    let d = c.domain();
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < n && tries < 100 * n {
        tries += 1;
        let u = (r.gen_range(d.x0..d.x1), r.gen_range(d.y0..d.y1));
        if normal_data(c, u).map_or(false, |nd| nd.nh_norm >= min_nh) {
            out.push(u);
        }
    }
    out
}

fn catenoid() -> Catenoid {
    Catenoid::new(1.0, 1.0).expect("valid catenoid")
}

fn helicoid(r: f64) -> Helicoid {
    Helicoid::new(r).expect("valid helicoid")
}

/// Minimal catalog charts used by the characteristic-derivative checks.
fn minimal_charts() -> Vec<Box<dyn Chart>> {
    vec![
        Box::new(catenoid()),
        Box::new(helicoid(1.0)),
        Box::new(helicoid(2.0)),
        Box::new(Paraboloid::default()),
    ]
}

// ------------------------------------------------------------------- core

fn core_checks() -> Vec<Check> {
    vec![
        check("associativity", "(pq)r = p(qr), |coords| <= 10", "group", 1e-12, || {
            let mut r = rng(101);
            max_of((0..500).map(|_| {
                let (p, q, s) = (rand_point(&mut r, 10.0), rand_point(&mut r, 10.0), rand_point(&mut r, 10.0));
                Ok(group_mul(group_mul(p, q), s).euclid_dist(&group_mul(p, group_mul(q, s))))
            }))
        }),
        check("left_invariance", "frame at p = (L_p)_* frame at origin", "group", 1e-12, || {
            let mut r = rng(102);
            let o = frame_at(Point::ORIGIN);
            max_of((0..200).map(|_| {
                let p = rand_point(&mut r, 10.0);
                let f = frame_at(p);
                let mut m = 0.0f64;
                for k in 0..3 {
                    let pushed = left_translate_vector(p, o[k]);
                    for i in 0..3 {
                        m = m.max((pushed[i] - f[k][i]).abs());
                    }
                }
                Ok(m)
            }))
        }),
        check("j_operator", "J(X)=Y, J(Y)=-X, J(T)=0, J skew", "group", 1e-12, || {
            let mut r = rng(103);
            let table = (jop(FrameVector::X) - FrameVector::Y).norm()
                + (jop(FrameVector::Y) + FrameVector::X).norm()
                + jop(FrameVector::T).norm();
            max_of(std::iter::once(Ok(table)).chain((0..100).map(|_| {
                let (u, v) = (rand_vec(&mut r), rand_vec(&mut r));
                Ok((jop(u).dot(&v) + u.dot(&jop(v))).abs())
            })))
        }),
        check("flow_commutator", "[X,Y]=-2T, [X,T]=[Y,T]=0 from flows", "bracket", 1e-6, || {
            let mut r = rng(104);
            let h = 1e-3;
            let pairs = [
                (FrameVector::X, FrameVector::Y, -2.0 * FrameVector::T),
                (FrameVector::X, FrameVector::T, FrameVector::ZERO),
                (FrameVector::Y, FrameVector::T, FrameVector::ZERO),
            ];
            max_of((0..20).flat_map(|_| {
                let p = rand_point(&mut r, 2.0);
                pairs.map(|(u, v, expect)| {
                    let q = flow(v, -h, flow(u, -h, flow(v, h, flow(u, h, p))));
                    let e = [(q.x - p.x) / (h * h), (q.y - p.y) / (h * h), (q.t - p.t) / (h * h)];
                    let got = crate::group::euclid_to_frame(p, e);
                    Ok((got - expect).norm().max((bracket_const(u, v) - expect).norm()))
                })
            }))
        }),
        check("christoffel_table", "D_X Y=-T, D_X T=Y, D_Y T=-X, D_T X=Y, ...", "tables", 1e-12, || {
            use FrameVector as F;
            let table = [
                (F::X, F::Y, -F::T),
                (F::X, F::T, F::Y),
                (F::Y, F::X, F::T),
                (F::Y, F::T, -F::X),
                (F::T, F::X, F::Y),
                (F::T, F::Y, -F::X),
                (F::X, F::X, F::ZERO),
                (F::Y, F::Y, F::ZERO),
                (F::T, F::T, F::ZERO),
            ];
            let p = Point::new(0.7, -1.3, 2.0);
            max_of(table.iter().map(|(u, v, e)| {
                let d = covariant_derivative(&ConstField(*u), &ConstField(*v), p)?;
                Ok((d - *e).norm().max((christoffel(*u, *v) - *e).norm()))
            }))
        }),
        check("metric_compatibility", "U<V,W> = <D_U V,W> + <V,D_U W>", "connection", 1e-8, || {
            let mut r = rng(105);
            let (u, v, w) = (FnField(poly_field(1)), FnField(poly_field(2)), FnField(poly_field(3)));
            max_of((0..20).map(|_| {
                let p = rand_point(&mut r, 1.0);
                let inner = FnField(|q: Point| FrameVector::new(v.coeffs(q).dot(&w.coeffs(q)), 0.0, 0.0));
                let lhs = directional_coeff_derivative(u.coeffs(p), &inner, p)?.a;
                let rhs = covariant_derivative(&u, &v, p)?.dot(&w.coeffs(p))
                    + v.coeffs(p).dot(&covariant_derivative(&u, &w, p)?);
                Ok((lhs - rhs).abs())
            }))
        }),
        check("torsion_free", "D_U V - D_V U - [U,V] = 0", "connection", 1e-8, || {
            let mut r = rng(106);
            let (u, v) = (FnField(poly_field(4)), FnField(poly_field(5)));
            max_of((0..20).map(|_| {
                let p = rand_point(&mut r, 1.0);
                let t = covariant_derivative(&u, &v, p)? - covariant_derivative(&v, &u, p)? - lie_bracket_euclid(&u, &v, p)?;
                Ok(t.norm())
            }))
        }),
        check("curvature_table", "R(X,Y)X=-3Y, R(X,Y)Y=3X, R(X,T)T=-X, ...", "tables", 1e-12, || {
            use FrameVector as F;
            let table = [
                (F::X, F::Y, F::X, -3.0 * F::Y),
                (F::X, F::Y, F::Y, 3.0 * F::X),
                (F::X, F::T, F::T, -F::X),
                (F::Y, F::T, F::T, -F::Y),
                (F::X, F::T, F::X, F::T),
                (F::Y, F::T, F::Y, F::T),
                (F::X, F::Y, F::T, F::ZERO),
                (F::X, F::T, F::Y, F::ZERO),
                (F::Y, F::T, F::X, F::ZERO),
            ];
            max_of(table.iter().map(|(u, v, w, e)| Ok((curvature_r(*u, *v, *w) - *e).norm())))
        }),
        check("curvature_nested_fd", "R(U,V)W from nested covariant derivatives", "curvature", 1e-8, || {
            // frame triples carried as closure fields so every derivative
            // goes through the finite-difference path
            let mut r = rng(107);
            let mut vals = Vec::new();
            for _ in 0..4 {
                let p = rand_point(&mut r, 1.5);
                for u in FRAME {
                    for v in FRAME {
                        for w in FRAME {
                            vals.push(nested_curvature(u, v, w, p).map(|d| (d - curvature_r(u, v, w)).norm()));
                        }
                    }
                }
            }
            max_of(vals)
        }),
        check("horizontal_curvature", "R(w,v)w = -3<v,Jw>Jw + <v,T>T, |w|=1 horizontal", "curvature", 1e-12, || {
            let mut r = rng(108);
            max_of((0..100).map(|_| {
                let th: f64 = r.gen_range(0.0..std::f64::consts::TAU);
                let w = FrameVector::new(th.cos(), th.sin(), 0.0);
                let v = rand_vec(&mut r);
                let jw = jop(w);
                let rhs = -3.0 * v.dot(&jw) * jw + v.c * FrameVector::T;
                Ok((curvature_r(w, v, w) - rhs).norm())
            }))
        }),
        check("ricci_table", "Ric(X,X)=Ric(Y,Y)=-2, Ric(T,T)=2, trace form", "tables", 1e-12, || {
            let mut r = rng(109);
            let tab = (ricci(FrameVector::X, FrameVector::X) + 2.0).abs()
                + (ricci(FrameVector::Y, FrameVector::Y) + 2.0).abs()
                + (ricci(FrameVector::T, FrameVector::T) - 2.0).abs()
                + ricci(FrameVector::X, FrameVector::T).abs();
            max_of(std::iter::once(Ok(tab)).chain((0..100).map(|_| {
                let (u, v) = (rand_vec(&mut r), rand_vec(&mut r));
                let n = u.normalized();
                let nh = n.horizontal().norm();
                Ok((ricci(u, v) - ricci_trace(u, v)).abs().max((ricci(n, n) - (2.0 - 4.0 * nh * nh)).abs()))
            })))
        }),
    ]
}

/// `D_V D_U W − D_U D_V W + D_{[U,V]} W` for constant-coefficient fields.
fn nested_curvature(u: FrameVector, v: FrameVector, w: FrameVector, p: Point) -> Result<FrameVector> {
    let (fu, fv, fw) = (FnField(move |_| u), FnField(move |_| v), FnField(move |_| w));
    let du_w = FnField(|q: Point| covariant_derivative(&fu, &fw, q).unwrap_or(FrameVector::new(f64::NAN, 0.0, 0.0)));
    let dv_w = FnField(|q: Point| covariant_derivative(&fv, &fw, q).unwrap_or(FrameVector::new(f64::NAN, 0.0, 0.0)));
    let br = lie_bracket_euclid(&fu, &fv, p)?;
    let a = covariant_derivative(&fv, &du_w, p)?;
    let b = covariant_derivative(&fu, &dv_w, p)?;
    let c = covariant_derivative(&ConstField(br), &fw, p)?;
    Ok(a - b + c)
}

// -------------------------------------------------------------- geodesics

fn geodesic_checks() -> Vec<Check> {
    vec![
        check("helper_branch_switch", "series and closed f,g,h agree across |x|=1e-4", "helpers", 1e-14, || {
            max_of([1e-4f64, -1e-4].map(|x| {
                let below = helpers_fgh(x * (1.0 - 1e-12));
                let above = helpers_fgh(x);
                Ok((below.0 - above.0).abs().max((below.1 - above.1).abs()).max((below.2 - above.2).abs()))
            }))
        }),
        check("straight_lines", "horizontal and vertical geodesics are Euclidean lines", "geodesic", 1e-12, || {
            let mut r = rng(201);
            let mut vals = Vec::new();
            for _ in 0..50 {
                let p = rand_point(&mut r, 3.0);
                let th: f64 = r.gen_range(0.0..std::f64::consts::TAU);
                let v = r.gen_range(0.2..2.0) * FrameVector::new(th.cos(), th.sin(), 0.0);
                let e = frame_to_euclid(p, v);
                let vt = r.gen_range(-2.0..2.0) * FrameVector::T;
                for s in [-3.0, -0.5, 0.8, 4.0] {
                    let expect = Point::new(p.x + s * e[0], p.y + s * e[1], p.t + s * e[2]);
                    vals.push(Ok(exp_geodesic(&GeodesicArc::new(p, v), s).0.euclid_dist(&expect)));
                    let q = exp_geodesic(&GeodesicArc::new(p, vt), s).0;
                    vals.push(Ok(q.euclid_dist(&Point::new(p.x, p.y, p.t + s * vt.c))));
                }
            }
            max_of(vals)
        }),
        check("lambda_conserved", "<gamma',T> = lambda on s in [-10,10]", "geodesic", 1e-10, || {
            conservation(|arc, vel| (vel.c - arc.lambda).abs())
        }),
        check("speed_conserved", "|gamma'| = |v0| on s in [-10,10]", "geodesic", 1e-10, || {
            conservation(|arc, vel| (vel.norm() - arc.v0.norm()).abs())
        }),
        check("semigroup", "restarted flow composes with the original", "geodesic", 1e-9, || {
            let mut r = rng(203);
            let mut vals = Vec::new();
            for _ in 0..30 {
                let arc = GeodesicArc::new(rand_point(&mut r, 2.0), rand_vec(&mut r));
                let (s1, s) = (r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0));
                let (q1, v1) = exp_geodesic(&arc, s1);
                let a = exp_geodesic(&GeodesicArc::new(q1, v1), s - s1).0;
                vals.push(Ok(a.euclid_dist(&exp_geodesic(&arc, s).0)));
            }
            max_of(vals)
        }),
        check("tilted_geodesic", "exp from 0 with (1,0,1) at s=pi is (0,0,3pi/2)", "geodesic", 1e-12, || {
            let arc = GeodesicArc::from_euclidean(Point::ORIGIN, [1.0, 0.0, 1.0]);
            let pi = std::f64::consts::PI;
            Ok(exp_geodesic(&arc, pi).0.euclid_dist(&Point::new(0.0, 0.0, 1.5 * pi)))
        }),
        check("jacobi_commutation", "[gamma', V] = 0 along geodesic families", "jacobi", 1e-5, || {
            let mut r = rng(204);
            let mut vals = Vec::new();
            for _ in 0..6 {
                let c: [f64; 9] = std::array::from_fn(|_| r.gen_range(-1.0..1.0));
                let fam = FnFamily::new(
                    move |e: f64| Point::new(c[0] * e, c[1] * e * e, c[2] * e),
                    move |e: f64| FrameVector::new(c[3] + c[6] * e, c[4] + c[7] * e.sin(), c[5] + c[8] * e * e),
                );
                for s in [-1.0, 0.5, 1.5] {
                    vals.push(jacobi_commutator_residual(&fam, 0.0, s));
                }
            }
            let hel = helicoid_ruling_family(2.0);
            for s in [-1.0, 0.3, 1.0] {
                vals.push(jacobi_commutator_residual(&hel, 0.2, s));
            }
            max_of(vals)
        }),
        check("jacobi_vertical_quadratic", "<V,T>(s) quadratic on helicoid rulings (fit rms)", "jacobi", 1e-8, || {
            max_of([1.0, 2.0, 3.0].map(|r| {
                let fam = helicoid_ruling_family(r);
                let samples = (0..=40)
                    .map(|i| {
                        let s = -1.0 + 0.05 * i as f64;
                        Ok((s, jacobi_field(&fam, 0.4, s)?.v.c))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(fit_quadratic(&samples)?.1)
            }))
        }),
        check("jacobi_equation_horizontal", "V'' - 3<V,Jg'>Jg' + |g'|^2<V,T>T = 0", "jacobi", 1e-5, || {
            let hel = helicoid_ruling_family(2.0);
            let lines = FnFamily::new(|e: f64| Point::new(0.0, 0.0, e), |_| FrameVector::Y);
            let mut vals = Vec::new();
            for s in [-1.0, -0.3, 0.2, 0.9] {
                for fam in [&hel as &dyn crate::geodesics::GeodesicFamily, &lines] {
                    vals.push(jacobi_field(fam, 0.1, s).and_then(|j| {
                        let res = jacobi_residual(&j, j.gamma_vel);
                        res.horizontal.ok_or_else(|| Error::Domain("non-horizontal ruling".into())).map(|h| h.max(res.ode))
                    }));
                }
            }
            max_of(vals)
        }),
        check("jacobi_equation_general", "V'' + R(g',V)g' = 0 on random families", "jacobi", 1e-4, || {
            let mut r = rng(205);
            let mut vals = Vec::new();
            for _ in 0..6 {
                let c: [f64; 9] = std::array::from_fn(|_| r.gen_range(-1.0..1.0));
                let fam = FnFamily::new(
                    move |e: f64| Point::new(c[0] * e, c[1] * e * e, c[2] * e),
                    move |e: f64| FrameVector::new(c[3] + c[6] * e, c[4] + c[7] * e.sin(), c[5] + c[8] * e * e),
                );
                for s in [-1.0, 0.5, 1.5] {
                    vals.push(jacobi_field(&fam, 0.0, s).map(|j| jacobi_residual(&j, j.gamma_vel).ode));
                }
            }
            max_of(vals)
        }),
    ]
}

fn conservation(measure: impl Fn(&GeodesicArc, FrameVector) -> f64) -> Result<f64> {
    let mut r = rng(202);
    let mut m = 0.0f64;
    for _ in 0..30 {
        let arc = GeodesicArc::new(rand_point(&mut r, 2.0), rand_vec(&mut r));
        for i in 0..=80 {
            let s = -10.0 + 0.25 * i as f64;
            m = m.max(measure(&arc, exp_geodesic(&arc, s).1));
        }
    }
    Ok(m)
}

// --------------------------------------------------------------- surfaces

fn surface_checks() -> Vec<Check> {
    vec![
        check("normal_relations", "|N_h|^2+<N,T>^2=1, nu_h^T=<N,T>S, T^T=-|N_h|S", "relations", 1e-10, || {
            let mut vals = Vec::new();
            for c in minimal_charts() {
                for u in regular_grid(c.as_ref(), 12, 1e-3) {
                    vals.push(surface_frame(c.as_ref(), u).map(|f| {
                        let tang = |v: FrameVector| v - v.dot(&f.n) * f.n;
                        let a = (f.nh_norm * f.nh_norm + f.nt * f.nt - 1.0).abs();
                        let b = (tang(f.nu_h) - f.nt * f.s).norm();
                        let t = (tang(FrameVector::T) + f.nh_norm * f.s).norm();
                        let orth = f.z.dot(&f.s).abs() + (f.z.norm() - 1.0).abs() + (f.s.norm() - 1.0).abs()
                            + f.z.c.abs() + f.z.dot(&f.n).abs() + f.s.dot(&f.n).abs();
                        a.max(b).max(t).max(orth)
                    }));
                }
            }
            max_of(vals)
        }),
        check("mean_curvature_relation", "2H|N_h| = <B(Z),Z>", "relations", 1e-10, || {
            let mut vals = Vec::new();
            for c in minimal_charts() {
                for u in regular_grid(c.as_ref(), 10, 1e-3) {
                    vals.push(surface_frame(c.as_ref(), u).map(|f| (2.0 * f.h * f.nh_norm - f.bzz).abs()));
                }
            }
            max_of(vals)
        }),
        check("minimality", "|H| on paraboloid, catenoid, H_1, H_2 grids", "minimality", 1e-8, || {
            let mut vals = Vec::new();
            for c in minimal_charts() {
                for u in regular_grid(c.as_ref(), 16, 1e-3) {
                    vals.push(surface_frame(c.as_ref(), u).map(|f| f.h.abs()));
                }
            }
            max_of(vals)
        }),
        check("vertical_plane_frame", "vertical plane: <N,T>=0, <B(Z),S>=1, L(|N_h|)=0", "minimality", 1e-8, || {
            let vp = VerticalPlane::new(0.3, -0.7, 0.9);
            max_of(regular_grid(&vp, 6, 0.5).into_iter().map(|u| {
                let f = surface_frame(&vp, u)?;
                let l = operator_l(&vp, &SurfaceField::Nh, u)?;
                Ok(f.nt.abs().max((f.bzs - 1.0).abs()).max((f.nh_norm - 1.0).abs()).max(l.abs()))
            }))
        }),
        check("dzz", "D_Z Z = 2H nu_h", "z_derivative", 1e-5, || {
            zcheck(|c, u, f| Ok((z_covariant(c, |g| g.z, u)? - 2.0 * f.h * f.nu_h).norm()))
        }),
        check("dz_nu_h", "D_Z nu_h = T - 2H Z", "z_derivative", 1e-5, || {
            zcheck(|c, u, f| Ok((z_covariant(c, |g| g.nu_h, u)? - (FrameVector::T - 2.0 * f.h * f.z)).norm()))
        }),
        check("z_nt", "Z(<N,T>) = |N_h|(<B(Z),S>-1)", "z_derivative", 1e-5, || {
            zcheck(|c, u, f| Ok((z_derivative(c, &SurfaceField::Nt, u, 1)? - f.nh_norm * (f.bzs - 1.0)).abs()))
        }),
        check("s_nt", "S(<N,T>) = |N_h|<B(S),S>", "z_derivative", 1e-5, || {
            zcheck(|c, u, f| Ok((s_derivative(c, &SurfaceField::Nt, u, 1)? - f.nh_norm * f.bss).abs()))
        }),
        check("z_nh", "Z(|N_h|) = <N,T>(1-<B(Z),S>)", "z_derivative", 1e-5, || {
            zcheck(|c, u, f| Ok((z_derivative(c, &SurfaceField::Nh, u, 1)? - f.nt * (1.0 - f.bzs)).abs()))
        }),
        check("z_bzs", "Z(<B(Z),S>) on minimal surfaces (relative)", "z_derivative", 1e-4, || {
            zcheck(|c, u, f| {
                let expect = 4.0 * f.nh_norm * f.nt - 2.0 / f.nh_norm * f.nt * f.bzs * (1.0 + f.bzs);
                Ok((z_derivative(c, &SurfaceField::Bzs, u, 1)? - expect).abs() / (1.0 + expect.abs()))
            })
        }),
        check("helicoid_closed_forms", "|N_h|, <N,T>, <B(Z),S> on H_R vs closed forms", "helicoid", 1e-8, || {
            let mut vals = Vec::new();
            for r in [0.5, 1.0, 2.0, 3.0] {
                let h = helicoid(r);
                for u in regular_grid(&h, 14, 1e-3) {
                    let s = u.0;
                    vals.push(surface_frame(&h, u).map(|f| {
                        (f.nh_norm - h.nh_closed(s))
                            .abs()
                            .max((f.nt - h.nt_closed(s)).abs())
                            .max((f.bzs - h.bzs_closed(s)).abs() / (1.0 + h.bzs_closed(s).abs()))
                    }));
                }
            }
            max_of(vals)
        }),
        check("q_closed_form_R1", "q = (R^2-4)f^2/(f^2+R^2 s^2)^2 on H_1", "helicoid", 1e-6, || {
            let h = helicoid(1.0);
            max_of(regular_grid(&h, 20, 1e-3).into_iter().map(|u| Ok((surface_frame(&h, u)?.q() - h.q_closed(u.0)).abs())))
        }),
        check("area_density_helicoid", "helicoid area density = |f(s)|", "helicoid", 1e-12, || {
            let h = helicoid(2.0);
            max_of(regular_grid(&h, 15, 0.0).into_iter().map(|u| {
                Ok((normal_data(&h, u)?.area_density() - h.f(u.0).abs()).abs())
            }))
        }),
    ]
}

/// Residual of a characteristic-derivative identity over random regular
/// points of the minimal catalog charts.
fn zcheck<F>(probe: F) -> Result<f64>
where
    F: Fn(&dyn Chart, (f64, f64), &crate::surfaces::SurfaceFrame) -> Result<f64>,
{
    let mut r = rng(301);
    let mut vals = Vec::new();
    for c in minimal_charts() {
        for u in random_regular(c.as_ref(), &mut r, 15, 5e-2) {
            vals.push(surface_frame(c.as_ref(), u).and_then(|f| probe(c.as_ref(), u, &f)));
        }
    }
    max_of(vals)
}

// -------------------------------------------------------------- stability

fn stability_checks() -> Vec<Check> {
    vec![
        check("l_nh_closed_vs_direct", "L(|N_h|) closed form vs operator (relative)", "operator_l", 1e-4, || {
            let mut r = rng(401);
            let charts: Vec<Box<dyn Chart>> = vec![Box::new(catenoid()), Box::new(helicoid(2.0))];
            let mut vals = Vec::new();
            for c in &charts {
                for u in random_regular(c.as_ref(), &mut r, 100, 1e-2) {
                    vals.push((|| {
                        let direct = operator_l(c.as_ref(), &SurfaceField::Nh, u)?;
                        let closed = l_nh_closed(c.as_ref(), u)?;
                        Ok(((direct - closed) / closed).abs())
                    })());
                }
            }
            max_of(vals)
        }),
        check("l_nh_nonnegative_catenoid", "L(|N_h|) >= 0 on the catenoid (max negative part)", "operator_l", 1e-8, || {
            let c = catenoid();
            max_of(regular_grid(&c, 30, 0.0).into_iter().map(|u| Ok((-l_nh_closed(&c, u)?).max(0.0))))
        }),
        check("l_nh_helicoid_closed", "L(|N_h|) = -4/f^2 on H_1, H_2", "operator_l", 1e-8, || {
            let mut vals = Vec::new();
            for r in [1.0, 2.0] {
                let h = helicoid(r);
                for u in regular_grid(&h, 20, 1e-2) {
                    vals.push(l_nh_closed(&h, u).map(|v| {
                        let e = h.l_nh_closed_form(u.0);
                        (v - e).abs() / (1.0 + e.abs())
                    }));
                }
            }
            max_of(vals)
        }),
        check("discriminant_identity", "b^2-4ac = -|N_h|^2 L(|N_h|)", "jacobi_quadratic", 1e-8, || {
            let mut r = rng(402);
            let charts = minimal_charts();
            let mut vals = Vec::new();
            for c in &charts {
                for u in random_regular(c.as_ref(), &mut r, 25, 1e-2) {
                    vals.push((|| {
                        let f = surface_frame(c.as_ref(), u)?;
                        let q = jacobi_vertical_quadratic(c.as_ref(), u)?;
                        let rhs = -f.nh_norm * f.nh_norm * l_nh_of(&f);
                        Ok((q.disc - rhs).abs() / (1.0 + rhs.abs()))
                    })());
                }
            }
            max_of(vals)
        }),
        check("q_identically_zero_R2", "q = |B(Z)+S|^2 - 4|N_h|^2 vanishes on H_2", "helicoid_q", 1e-8, || {
            let h = helicoid(2.0);
            max_of(regular_grid(&h, 30, 1e-3).into_iter().map(|u| Ok(surface_frame(&h, u)?.q().abs())))
        }),
        check("q_matches_closed_R1", "q on H_1 vs (R^2-4)f^2/D^2", "helicoid_q", 1e-6, || {
            let h = helicoid(1.0);
            max_of(regular_grid(&h, 30, 1e-3).into_iter().map(|u| Ok((surface_frame(&h, u)?.q() - h.q_closed(u.0)).abs())))
        }),
        check("index_form_nh_identity", "I(f|N_h|,f|N_h|) vs int |N_h|(Z(f)^2 - L f^2)", "index_form", 1e-3, || {
            let c = catenoid();
            let quad = QuadratureSpec::new(16, (4, 4))?;
            let b = Profile::bump;
            let fs = [
                Separable::new(b(2.0, 0.6)?, b(0.0, 1.0)?),
                Separable::new(b(1.6, 0.4)?, b(0.5, 0.8)?),
                Separable::new(b(3.0, 1.0)?, b(-1.0, 1.5)?),
                Separable::new(b(2.5, 1.2)?, Profile::cosine(2.0)?),
                Separable::new(b(4.0, 0.5)?, b(2.0, 0.5)?),
            ];
            max_of(fs.iter().map(|f| {
                let c = &c;
                let g = FnTestFunction::new(
                    move |a, bb| {
                        let v = f.value(a, bb);
                        if v == 0.0 {
                            0.0
                        } else {
                            normal_data(c, (a, bb)).map_or(f64::NAN, |nd| v * nd.nh_norm)
                        }
                    },
                    f.support(),
                );
                let lhs = index_form(c, &g, &g, &quad)?;
                let rhs = index_form_nh_weighted(c, f, &quad)?;
                Ok((lhs - rhs).abs() / lhs.abs().max(1.0))
            }))
        }),
        check("q_form_regular_nonnegative", "Q(u) >= 0 for u supported in the regular part of H_2", "q_form", 1e-10, || {
            let quad = QuadratureSpec::new(16, (8, 8))?;
            max_of([(1.5, 0.5), (-2.0, 1.0), (0.2, 0.2), (0.9, 0.3)].map(|(c, w)| {
                let u = Separable::new(Profile::bump(c, w)?, Profile::bump(0.3, 1.5)?);
                Ok((-q_form_parts(2.0, &u, &quad)?.total()).max(0.0))
            }))
        }),
        check("stationarity", "|A'(0)|/A(0) for compact nonsingular variations", "stationarity", 1e-6, || {
            let quad = QuadratureSpec::new(8, (4, 4))?;
            let b = Profile::bump;
            let cases: Vec<(Box<dyn Chart>, Separable)> = vec![
                (Box::new(catenoid()), Separable::new(b(2.0, 0.6)?, b(0.0, 1.0)?)),
                (Box::new(helicoid(2.0)), Separable::new(b(1.2, 0.4)?, b(0.0, 1.0)?)),
                (Box::new(Paraboloid::default()), Separable::new(b(1.0, 0.5)?, b(0.0, 1.0)?)),
                (Box::new(VerticalPlane::x_equals_zero()), Separable::new(b(0.0, 1.0)?, b(0.0, 1.0)?)),
            ];
            let zero = Separable::zero();
            let mut vals = Vec::new();
            for (c, v) in &cases {
                for w in [&zero, v] {
                    vals.push(area_variation(c.as_ref(), v, w, &quad, 1e-3).map(|a| a.first.abs() / a.a0));
                }
            }
            max_of(vals)
        }),
    ]
}

// --------------------------------------------------------------- numerics

fn numerics_checks() -> Vec<Check> {
    vec![
        check("gauss_legendre_exactness", "degree 2n-1 polynomials integrated exactly (relative)", "quadrature", 1e-13, || {
            let mut vals = Vec::new();
            for n in [4usize, 8, 16, 32] {
                let spec = QuadratureSpec::new(n, (1, 1))?;
                let d = 2 * n as i32 - 1;
                let got = gauss_legendre_1d(|x| x.powi(d) + x.powi(d - 1), 0.0, 1.0, &spec)?;
                let exact = 1.0 / (d + 1) as f64 + 1.0 / d as f64;
                vals.push(Ok(((got - exact) / exact).abs()));
            }
            max_of(vals)
        }),
        check("reproducibility", "bitwise-identical repeated and multi-thread evaluation", "quadrature", 0.0, || {
            let spec = QuadratureSpec::new(16, (8, 8))?;
            let h = helicoid(2.0);
            let rect = Rect::new(-1.0, 1.0, 0.0, 2.0);
            let a = area(&h, rect, &spec)?;
            let b = area(&h, rect, &spec)?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(1)
                .build()
                .map_err(|e| Error::InvalidSpec(e.to_string()))?;
            let c = pool.install(|| area(&h, rect, &spec))?;
            let f = integrate_2d(|x, y| (x * y).sin() + 1.0, rect, &spec)?;
            let g = pool.install(|| integrate_2d(|x, y| (x * y).sin() + 1.0, rect, &spec))?;
            Ok(if a.to_bits() == b.to_bits() && a.to_bits() == c.to_bits() && f.to_bits() == g.to_bits() {
                0.0
            } else {
                1.0
            })
        }),
        check("adaptive_quadrature", "adaptive 1-D rule meets its tolerance on a log-singular integrand", "quadrature", 1e-10, || {
            let spec = QuadratureSpec::new(16, (1, 1))?.with_adaptive_tol(1e-13);
            let got = gauss_legendre_1d(|x| (x + 1e-3).ln(), 0.0, 1.0, &spec)?;
            let e = 1e-3f64;
            let exact = (1.0 + e) * (1.0 + e).ln() - (1.0 + e) - (e * e.ln() - e);
            Ok((got - exact).abs())
        }),
        check("compensated_sum", "compensated summation keeps 1e-16 increments past 1.0", "quadrature", 1e-10, || {
            let mut s = CompensatedSum::new();
            s.add(1.0);
            for _ in 0..10_000 {
                s.add(1e-16);
            }
            s.add(-1.0);
            Ok((s.total() - 1e-12).abs() / 1e-12)
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registries_have_unique_names() {
        let mut names: Vec<&str> = Suite::ALL.iter().flat_map(|s| check_names(*s)).collect();
        let n = names.len();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), n);
    }

    #[test]
    fn overrides_are_validated() {
        let mut t = Tolerances::new();
        assert!(t.set_from_str("z_derivative=1e-3").is_ok());
        assert!(t.set_from_str("q_identically_zero_R2=1e-9").is_ok());
        assert!(matches!(t.set_from_str("bogus=1"), Err(Error::InvalidSpec(_))));
        assert!(matches!(t.set_from_str("dzz=-1"), Err(Error::InvalidSpec(_))));
        assert!(matches!(t.set_from_str("dzz"), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn name_override_beats_group_override() {
        let mut t = Tolerances::new();
        t.set("z_derivative", 1e-3).unwrap();
        t.set("z_bzs", 1e-2).unwrap();
        let res = run_suite(Suite::Surfaces, &t);
        let get = |n: &str| res.iter().find(|r| r.name == n).unwrap().clone();
        assert_eq!(get("dzz").threshold, 1e-3);
        assert_eq!(get("dzz").override_key.as_deref(), Some("z_derivative"));
        assert_eq!(get("z_bzs").threshold, 1e-2);
        assert_eq!(get("minimality").override_key, None);
    }

    #[test]
    fn every_suite_passes_with_defaults() {
        for s in Suite::ALL {
            for r in run_suite(s, &Tolerances::new()) {
                assert_eq!(r.status, Status::Pass, "{r}");
            }
        }
    }

    #[test]
    fn non_finite_residual_is_reported() {
        assert!(max_of([Ok(1.0), Ok(f64::NAN)]).unwrap().is_nan());
        let c = check("x", "x", "x", 1.0, || Err(Error::NonFinite("probe")));
        let out = (c.probe)();
        assert!(matches!(out, Err(Error::NonFinite(_))));
    }

    #[test]
    fn reports_are_deterministic() {
        let a: Vec<String> = run_suite(Suite::Core, &Tolerances::new()).iter().map(|r| r.to_string()).collect();
        let b: Vec<String> = run_suite(Suite::Core, &Tolerances::new()).iter().map(|r| r.to_string()).collect();
        assert_eq!(a, b);
    }
}
