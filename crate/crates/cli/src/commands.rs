use std::fmt::Write as _;
use std::sync::Arc;

use h1geom::checks::{run_suite, Status, Suite, Tolerances};
use h1geom::geodesics::{exp_geodesic, GeodesicArc};
use h1geom::numerics::{QuadratureSpec, Rect};
use h1geom::stability::{
    certify_instability_h2, certify_instability_helicoid, certify_instability_nosing, H2Search, Profile,
};
use h1geom::surfaces::{
    normal_data, surface_frame, Catenoid, Chart, Helicoid, Paraboloid, Plane, VerticalPlane,
};
use h1geom::{Error, FrameVector, Point};

use crate::config::RunConfig;
use crate::CliError;

/// Text to write and the exit code it implies.
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

fn core_err(e: Error) -> CliError {
    match e {
        Error::InvalidSpec(m) | Error::Domain(m) => CliError::Config(m),
        e => CliError::Numeric(e.to_string()),
    }
}

// ----------------------------------------------------------------- verify

pub const VERIFY_KEYS: &[&str] = &["suite", "output", "tol.*"];

pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.check_keys(VERIFY_KEYS)?;
    let suites = Suite::parse_list(cfg.get_str("suite").unwrap_or("all")).map_err(core_err)?;
    let mut tol = Tolerances::new();
    for (k, v) in cfg.with_prefix("tol.") {
        tol.set_from_str(&format!("{k}={v}")).map_err(core_err)?;
    }
    let mut text = String::new();
    for (k, v) in tol.iter() {
        writeln!(text, "# tolerance override {k}={v:e}").unwrap();
    }
    let (mut pass, mut fail, mut nonfinite) = (0, 0, 0);
    for s in suites {
        for r in run_suite(s, &tol) {
            match r.status {
                Status::Pass => pass += 1,
                Status::Fail => fail += 1,
                Status::NonFinite => nonfinite += 1,
            }
            writeln!(text, "{r}").unwrap();
        }
    }
    writeln!(text, "# {} checks: {pass} PASS, {fail} FAIL, {nonfinite} NONFINITE", pass + fail + nonfinite).unwrap();
    let code = if nonfinite > 0 {
        3
    } else if fail > 0 {
        1
    } else {
        0
    };
    Ok(Outcome { text, code })
}

// ----------------------------------------------------------------- export

pub const GEODESIC_KEYS: &[&str] = &["p0", "v0", "s_min", "s_max", "samples", "output"];
pub const GRID_KEYS: &[&str] = &[
    "surface", "R", "lambda", "sheet", "a", "b", "c", "x0", "y0", "phi", "u1", "u2", "output",
];

/// 17 significant digits; singular or failed values print as `nan`.
fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.16e}")
    }
}

pub fn export_geodesic(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.check_keys(GEODESIC_KEYS)?;
    let p0 = cfg.get_list::<3>("p0")?.unwrap_or([0.0; 3]);
    let v0 = cfg.get_list::<3>("v0")?.ok_or_else(|| CliError::Config("'v0' (frame coefficients a,b,c) is required".into()))?;
    let s_min: f64 = cfg.get_or("s_min", 0.0)?;
    let s_max: f64 = cfg.get_or("s_max", 1.0)?;
    let n: usize = cfg.get_or("samples", 11)?;
    if !(s_min.is_finite() && s_max.is_finite()) {
        return Err(CliError::Config("s range must be finite".into()));
    }
    let arc = GeodesicArc::new(Point::from_array(p0), FrameVector::from_array(v0));
    let mut text = String::from("s,x,y,t,lambda,speed\n");
    for i in 0..n {
        let s = if n == 1 { s_min } else { s_min + (s_max - s_min) * i as f64 / (n - 1) as f64 };
        let (p, v) = exp_geodesic(&arc, s);
        if !(p.is_finite() && v.is_finite()) {
            return Err(CliError::Numeric(format!("non-finite geodesic value at s={s}")));
        }
        writeln!(text, "{},{},{},{},{},{}", num(s), num(p.x), num(p.y), num(p.t), num(v.c), num(v.norm())).unwrap();
    }
    Ok(Outcome { text, code: 0 })
}

struct Axis {
    min: f64,
    max: f64,
    n: usize,
}

impl Axis {
    fn node(&self, i: usize) -> f64 {
        if self.n == 1 {
            self.min
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.n - 1) as f64
        }
    }
}

fn axis(cfg: &RunConfig, key: &str, default: [f64; 3]) -> Result<Axis, CliError> {
    let [min, max, n] = cfg.get_list::<3>(key)?.unwrap_or(default);
    if n < 0.0 || n.fract() != 0.0 || min > max {
        return Err(CliError::Config(format!("'{key}' must be min,max,n with min <= max and integer n >= 0")));
    }
    Ok(Axis { min, max, n: n as usize })
}

/// Validates the surface kind and that only its own parameters are set.
fn surface_kind(cfg: &RunConfig) -> Result<&str, CliError> {
    let kind = cfg.get_str("surface").ok_or_else(|| CliError::Config("'surface' is required".into()))?;
    let allowed: &[&str] = match kind {
        "helicoid" => &["R"],
        "catenoid" => &["lambda", "sheet"],
        "plane" => &["a", "b", "c"],
        "vertical_plane" => &["x0", "y0", "phi"],
        "paraboloid" => &[],
        _ => return Err(CliError::Config(format!("unknown surface '{kind}'"))),
    };
    for k in ["R", "lambda", "sheet", "a", "b", "c", "x0", "y0", "phi"] {
        if cfg.get_str(k).is_some() && !allowed.contains(&k) {
            return Err(CliError::Config(format!("'{k}' does not apply to surface '{kind}'")));
        }
    }
    Ok(kind)
}

/// `(u1 min, max, n, u2 min, max, n)` used when the grid is not given.
fn default_grid(kind: &str, cfg: &RunConfig) -> Result<[f64; 6], CliError> {
    Ok(match kind {
        "helicoid" => {
            let r: f64 = cfg.get_or("R", 2.0)?;
            [-1.0 / r, 1.0 / r, 5.0, -1.0, 1.0, 5.0]
        }
        "catenoid" => {
            let l: f64 = cfg.get_or("lambda", 1.0)?;
            [1.5 * l, 3.0 * l, 4.0, -3.0, 3.0, 7.0]
        }
        _ => [-1.0, 1.0, 5.0, -1.0, 1.0, 5.0],
    })
}

fn build_surface(kind: &str, cfg: &RunConfig, dom: Rect) -> Result<Box<dyn Chart>, CliError> {
    Ok(match kind {
        "helicoid" => Box::new(Helicoid::new(cfg.get_or("R", 2.0)?).map_err(core_err)?.with_domain(dom)),
        "catenoid" => {
            let l = cfg.get_or("lambda", 1.0)?;
            let c = Catenoid::new(l, cfg.get_or("sheet", 1.0)?).map_err(core_err)?;
            if dom.x0 <= l {
                return Err(CliError::Config(format!("catenoid grid needs u1 (radius) > lambda = {l}")));
            }
            Box::new(c.with_domain(dom))
        }
        "plane" => {
            let p = Plane::new(cfg.get_or("a", 0.0)?, cfg.get_or("b", 0.0)?, cfg.get_or("c", 0.0)?);
            Box::new(p.with_domain(dom))
        }
        "vertical_plane" => {
            let phi = cfg.get_or("phi", std::f64::consts::FRAC_PI_2)?;
            Box::new(VerticalPlane::new(cfg.get_or("x0", 0.0)?, cfg.get_or("y0", 0.0)?, phi).with_domain(dom))
        }
        _ => Box::new(Paraboloid { domain: dom }),
    })
}

pub fn export_surface_grid(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.check_keys(GRID_KEYS)?;
    let kind = surface_kind(cfg)?;
    let d = default_grid(kind, cfg)?;
    let a1 = axis(cfg, "u1", [d[0], d[1], d[2]])?;
    let a2 = axis(cfg, "u2", [d[3], d[4], d[5]])?;
    let mut text = String::from("u1,u2,x,y,t,Nh,NT,BZS,H,q,area_density\n");
    if a1.n == 0 || a2.n == 0 {
        return Ok(Outcome { text, code: 0 });
    }
    let chart = build_surface(kind, cfg, Rect::new(a1.min, a1.max, a2.min, a2.max))?;
    for i in 0..a1.n {
        for j in 0..a2.n {
            let u = (a1.node(i), a2.node(j));
            let nd = normal_data(chart.as_ref(), u).map_err(|e| CliError::Numeric(format!("at {u:?}: {e}")))?;
            let (bzs, h, q) = match surface_frame(chart.as_ref(), u) {
                Ok(f) => (f.bzs, f.h, f.q()),
                Err(Error::SingularPoint { .. }) => (f64::NAN, f64::NAN, f64::NAN),
                Err(e) => return Err(CliError::Numeric(format!("at {u:?}: {e}"))),
            };
            let p = nd.point;
            let row = [u.0, u.1, p.x, p.y, p.t, nd.nh_norm, nd.nt, bzs, h, q, nd.area_density()];
            if row.iter().any(|v| v.is_infinite()) {
                return Err(CliError::Numeric(format!("non-finite value at {u:?}")));
            }
            let cols: Vec<String> = row.iter().map(|v| num(*v)).collect();
            writeln!(text, "{}", cols.join(",")).unwrap();
        }
    }
    Ok(Outcome { text, code: 0 })
}

// ---------------------------------------------------------------- certify

pub const H2_KEYS: &[&str] = &["quad_points", "quad_cells", "output"];
pub const HELICOID_KEYS: &[&str] = &["R", "quad_points", "quad_cells", "output"];
pub const CATENOID_KEYS: &[&str] = &["lambda", "k_max", "phi_half_width", "quad_points", "quad_cells", "output"];

fn quad(cfg: &RunConfig, default: QuadratureSpec) -> Result<QuadratureSpec, CliError> {
    let pts = cfg.get_or("quad_points", default.points_per_cell)?;
    let cells = match cfg.get_str("quad_cells") {
        None => default.cells,
        Some(v) => {
            let bad = || CliError::Config(format!("'quad_cells' must be AxB, got {v:?}"));
            let (a, b) = v.split_once('x').ok_or_else(bad)?;
            (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
        }
    };
    QuadratureSpec::new(pts, cells).map_err(core_err)
}

fn certificate_outcome(r: h1geom::Result<h1geom::stability::InstabilityCertificate>) -> Result<Outcome, CliError> {
    match r {
        Ok(c) => {
            let code = if c.is_confirmed() { 0 } else { 1 };
            Ok(Outcome { text: c.to_string(), code })
        }
        Err(Error::CertificateNotFound(m)) => Ok(Outcome { text: format!("# no certificate: {m}\n"), code: 1 }),
        Err(e) => Err(core_err(e)),
    }
}

pub fn certify_h2(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.check_keys(H2_KEYS)?;
    let search = H2Search { quad: quad(cfg, H2Search::default().quad)?, ..H2Search::default() };
    certificate_outcome(certify_instability_h2(&search))
}

pub fn certify_helicoid(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.check_keys(HELICOID_KEYS)?;
    let r: f64 = cfg.get("R")?.ok_or_else(|| CliError::Config("'R' is required".into()))?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(CliError::Config(format!("R must be positive, got {r}")));
    }
    let search = H2Search { quad: quad(cfg, H2Search::default().quad)?, ..H2Search::default() };
    certificate_outcome(certify_instability_helicoid(r, &search))
}

pub fn certify_catenoid(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.check_keys(CATENOID_KEYS)?;
    let l: f64 = cfg.get_or("lambda", 1.0)?;
    let k_max: usize = cfg.get_or("k_max", 64)?;
    if k_max == 0 {
        return Err(CliError::Config("k_max must be at least 1".into()));
    }
    let width: f64 = cfg.get_or("phi_half_width", 0.5 * l)?;
    let chart: Arc<dyn Chart> = Arc::new(Catenoid::new(l, 1.0).map_err(core_err)?);
    let phi = Profile::bump(0.0, width).map_err(core_err)?;
    let ks: Vec<f64> = (1..=k_max).map(|k| k as f64).collect();
    let q = quad(cfg, QuadratureSpec::new(16, (8, 32)).map_err(core_err)?)?;
    certificate_outcome(certify_instability_nosing(chart, (2f64.sqrt() * l, 0.0), &ks, phi, &q))
}
