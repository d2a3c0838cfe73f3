use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use super::helicoid::{bracket_integral, q_form, TUBE_MARGIN};
use super::operators::jacobi_vertical_quadratic;
use super::test_fn::{breakpoints, PhiKDelta, Profile, Separable};
use crate::error::{Error, Result};
use crate::numerics::{try_gauss_legendre_1d_breaks, QuadratureSpec, Rect};
use crate::surfaces::{area, ruled_coordinates, AffineImage, Chart, Helicoid};

/// Test function and quadrature evidence that a second-variation form is negative.
#[derive(Debug, Clone, PartialEq)]
pub struct InstabilityCertificate {
    pub surface: String,
    pub k: f64,
    /// Ramp width of `φ_kδ` (helicoid certificates only).
    pub delta: Option<f64>,
    /// Half-length of the ε-support.
    pub eps0: f64,
    /// Bracket value `C(k, δ)` (helicoid certificates only).
    pub c_value: Option<f64>,
    pub q_value: f64,
    /// The same value at doubled quadrature resolution.
    pub q_value_doubled: f64,
    pub quad: QuadratureSpec,
    /// Further evidence as key/value pairs.
    pub extra: Vec<(String, String)>,
}

impl InstabilityCertificate {
    /// Both quadrature resolutions agree that the form is negative.
    pub fn is_confirmed(&self) -> bool {
        self.q_value < 0.0 && self.q_value_doubled < 0.0
    }

    pub fn extra_value(&self, key: &str) -> Option<&str> {
        self.extra.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for InstabilityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "surface={}", self.surface)?;
        writeln!(f, "k={:.17e}", self.k)?;
        if let Some(d) = self.delta {
            writeln!(f, "delta={d:.17e}")?;
        }
        writeln!(f, "eps0={:.17e}", self.eps0)?;
        if let Some(c) = self.c_value {
            writeln!(f, "C={c:.17e}")?;
        }
        writeln!(f, "Q_value={:.17e}", self.q_value)?;
        writeln!(f, "Q_value_doubled={:.17e}", self.q_value_doubled)?;
        writeln!(f, "quad_points={}", self.quad.points_per_cell)?;
        writeln!(f, "quad_cells={}x{}", self.quad.cells.0, self.quad.cells.1)?;
        for (k, v) in &self.extra {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

impl FromStr for InstabilityCertificate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: String| Error::InvalidSpec(format!("certificate: {m}"));
        let num = |v: &str| v.parse::<f64>().map_err(|_| bad(format!("bad number {v:?}")));
        let mut surface = None;
        let (mut k, mut delta, mut eps0, mut c_value, mut q, mut q2) = (None, None, None, None, None, None);
        let (mut pts, mut cells) = (None, None);
        let mut extra = Vec::new();
        for line in s.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (key, val) = line.split_once('=').ok_or_else(|| bad(format!("missing '=' in {line:?}")))?;
            match key {
                "surface" => surface = Some(val.to_string()),
                "k" => k = Some(num(val)?),
                "delta" => delta = Some(num(val)?),
                "eps0" => eps0 = Some(num(val)?),
                "C" => c_value = Some(num(val)?),
                "Q_value" => q = Some(num(val)?),
                "Q_value_doubled" => q2 = Some(num(val)?),
                "quad_points" => pts = Some(val.parse::<usize>().map_err(|_| bad(format!("bad integer {val:?}")))?),
                "quad_cells" => {
                    let (a, b) = val.split_once('x').ok_or_else(|| bad(format!("bad cells {val:?}")))?;
                    let p = |t: &str| t.parse::<usize>().map_err(|_| bad(format!("bad integer {t:?}")));
                    cells = Some((p(a)?, p(b)?));
                }
                _ => extra.push((key.to_string(), val.to_string())),
            }
        }
        let need = |o: Option<f64>, name: &str| o.ok_or_else(|| bad(format!("missing {name}")));
        Ok(Self {
            surface: surface.ok_or_else(|| bad("missing surface".into()))?,
            k: need(k, "k")?,
            delta,
            eps0: need(eps0, "eps0")?,
            c_value,
            q_value: need(q, "Q_value")?,
            q_value_doubled: need(q2, "Q_value_doubled")?,
            quad: QuadratureSpec::new(
                pts.ok_or_else(|| bad("missing quad_points".into()))?,
                cells.ok_or_else(|| bad("missing quad_cells".into()))?,
            )?,
            extra,
        })
    }
}

/// Search grid for the H₂ certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct H2Search {
    pub k_values: Vec<f64>,
    pub eps0_values: Vec<f64>,
    pub quad: QuadratureSpec,
}

impl Default for H2Search {
    /// `k ∈ {0.51 + 0.01 j}`, `ε₀ ∈ {2^m}`.
    fn default() -> Self {
        Self {
            k_values: (0..50).map(|j| 0.51 + 0.01 * j as f64).collect(),
            eps0_values: (0..7).map(|m| 2f64.powi(m)).collect(),
            quad: QuadratureSpec::new(16, (8, 8)).expect("static spec"),
        }
    }
}

/// The H₂ test function `φ(ε)·φ_kδ(s)` with `φ = cos(πε/(2ε₀))`, in chart order.
pub fn h2_test_function(k: f64, delta: f64, eps0: f64) -> Result<Separable> {
    Ok(Separable::new(Profile::Ramp(PhiKDelta::new(k, delta)?), Profile::cosine(eps0)?))
}

/// Rayleigh term `2∫φ'²/∫φ²` of the cosine profile on `[−ε₀, ε₀]`.
fn cosine_rayleigh(eps0: f64) -> f64 {
    2.0 * (std::f64::consts::PI / (2.0 * eps0)).powi(2)
}

/// Scans `k` (with `δ = 2k+1`) and then `ε₀` for a negative `Q(u)` on H₂.
/// The lexicographically first passing grid point is returned whatever the
/// evaluation order.
pub fn certify_instability_h2(search: &H2Search) -> Result<InstabilityCertificate> {
    let r = 2.0;
    let k_min = 1.0 / r + TUBE_MARGIN;
    let found = search.k_values.par_iter().enumerate().find_map_first(|(_, &k)| -> Option<Result<InstabilityCertificate>> {
        // the ramp must start outside the tube around s = ±1/2
        if k < k_min - 1e-12 {
            return None;
        }
        let delta = 2.0 * k + 1.0;
        let c = match bracket_integral(k, delta) {
            Ok(c) => c,
            Err(e) => return Some(Err(e)),
        };
        if c >= 8.0 {
            return None;
        }
        for &eps0 in &search.eps0_values {
            if cosine_rayleigh(eps0) >= 8.0 - c {
                continue;
            }
            let run = || -> Result<Option<InstabilityCertificate>> {
                let u = h2_test_function(k, delta, eps0)?;
                let q = q_form(r, &u, &search.quad)?;
                if q >= 0.0 {
                    return Ok(None);
                }
                let q2 = q_form(r, &u, &search.quad.doubled())?;
                Ok(Some(InstabilityCertificate {
                    surface: "helicoid R=2".into(),
                    k,
                    delta: Some(delta),
                    eps0,
                    c_value: Some(c),
                    q_value: q,
                    q_value_doubled: q2,
                    quad: search.quad,
                    extra: Vec::new(),
                }))
            };
            match run() {
                Ok(Some(cert)) if cert.is_confirmed() => return Some(Ok(cert)),
                Ok(_) => continue,
                Err(e) => return Some(Err(e)),
            }
        }
        None
    });
    match found {
        Some(res) => res,
        None => Err(Error::CertificateNotFound(format!(
            "no (k, eps0) in the grid gives C < 8 and Q < 0 ({} k values, {} eps0 values)",
            search.k_values.len(),
            search.eps0_values.len()
        ))),
    }
}

/// Certificate for H_R transported from the H₂ one by the dilation
/// `δ_λ`, `λ = log(2/R)`, which maps H₂ onto H_R with `(s, ε) ↦ e^λ(s, ε)`.
/// Area scales by `e^{3λ}`; the scaling is checked on the support patch
/// against the H_R chart itself.
pub fn certify_instability_helicoid(r: f64, search: &H2Search) -> Result<InstabilityCertificate> {
    let base = certify_instability_h2(search)?;
    if (r - 2.0).abs() < 1e-15 {
        return Ok(base);
    }
    let lam = (2.0 / r).ln();
    let e = lam.exp();
    let h2 = Helicoid::new(2.0)?;
    let hr = Helicoid::new(r)?;
    let half_s = base.k + base.delta.unwrap_or(0.0);
    let patch = Rect::new(-half_s, half_s, -base.eps0, base.eps0);
    let image = Rect::new(e * patch.x0, e * patch.x1, e * patch.y0, e * patch.y1);
    let mut h2w = h2;
    h2w.domain = patch;
    let mut hrw = hr;
    hrw.domain = image;
    let quad = base.quad;
    let a2 = area(&AffineImage::dilation(h2w, lam), patch, &quad)?;
    let ar = area(&hrw, image, &quad)?;
    let a_base = area(&h2w, patch, &quad)?;
    let chart_gap = ((a2 - ar) / ar).abs();
    let scale_gap = ((ar / a_base) / (3.0 * lam).exp() - 1.0).abs();
    if chart_gap > 1e-6 || scale_gap > 1e-6 {
        return Err(Error::CertificateNotFound(format!(
            "dilation check failed: chart gap {chart_gap:e}, scaling gap {scale_gap:e}"
        )));
    }
    let f = (3.0 * lam).exp();
    let mut extra = vec![
        ("derived_from".to_string(), "helicoid R=2".to_string()),
        ("lambda".to_string(), format!("{lam:.17e}")),
        ("Q_value_R2".to_string(), format!("{:.17e}", base.q_value)),
        ("area_scaling_gap".to_string(), format!("{scale_gap:.3e}")),
        ("area_chart_gap".to_string(), format!("{chart_gap:.3e}")),
    ];
    extra.extend(base.extra);
    Ok(InstabilityCertificate {
        surface: format!("helicoid R={r}"),
        k: e * base.k,
        delta: base.delta.map(|d| e * d),
        eps0: e * base.eps0,
        c_value: base.c_value,
        q_value: f * base.q_value,
        q_value_doubled: f * base.q_value_doubled,
        quad: base.quad,
        extra,
    })
}

/// Index value `∫(∂u/∂s)² dε ds − (3/4)∫L(|N_h|)u² dε ds` for
/// `u = φ(ε)φ(s/k)` in ruled coordinates, with `L(|N_h|)` along each line
/// from the Jacobi quadratic of its base point.
fn nosing_index<G>(quad_at: G, phi: &Profile, k: f64, quad: &QuadratureSpec) -> Result<f64>
where
    G: Fn(f64) -> Result<super::operators::JacobiQuadratic>,
{
    let psi = phi.stretched(k)?;
    let (e0, e1) = phi.support();
    let (s0, s1) = psi.support();
    let eb = breakpoints(e0, e1, phi.kinks());
    let sb = breakpoints(s0, s1, psi.kinks());
    let outer = QuadratureSpec::new(quad.points_per_cell, (quad.cells.0, 1))?;
    let inner = QuadratureSpec::new(quad.points_per_cell, (quad.cells.1, 1))?;
    try_gauss_legendre_1d_breaks(
        |e| {
            let pe = phi.value(e);
            if pe == 0.0 {
                return Ok(0.0);
            }
            let jq = quad_at(e)?;
            let line = try_gauss_legendre_1d_breaks(
                |s| {
                    let (v, d) = (psi.value(s), psi.deriv(s));
                    Ok(d * d - 0.75 * jq.l_nh_along(s) * v * v)
                },
                &sb,
                &inner,
            )?;
            Ok(pe * pe * line)
        },
        &eb,
        &outer,
    )
}

/// Instability certificate for a minimal surface without singular points:
/// scans `k_list` for a negative index value of `u_k v⁻¹|N_h|`, where
/// `u_k(ε,s) = φ(ε)φ(s/k)` in the ruled coordinates through `u0` and
/// `v = |⟨V_ε,T⟩|^{1/2}`.
pub fn certify_instability_nosing(
    chart: Arc<dyn Chart>,
    u0: (f64, f64),
    k_list: &[f64],
    phi: Profile,
    quad: &QuadratureSpec,
) -> Result<InstabilityCertificate> {
    let (e0, e1) = phi.support();
    if !(e0.is_finite() && e1.is_finite() && phi.value(0.0) > 0.0) {
        return Err(Error::InvalidSpec("phi must be compactly supported with phi(0) > 0".into()));
    }
    let ruled = ruled_coordinates(chart.clone(), u0, (e0, e1), (-1.0, 1.0))?;
    let quad_at = |e: f64| jacobi_vertical_quadratic(chart.as_ref(), ruled.gamma(e)?);
    let found = k_list.par_iter().find_map_first(|&k| -> Option<Result<(f64, f64, f64)>> {
        let run = || -> Result<Option<(f64, f64, f64)>> {
            let q = nosing_index(quad_at, &phi, k, quad)?;
            if q >= 0.0 {
                return Ok(None);
            }
            let q2 = nosing_index(quad_at, &phi, k, &quad.doubled())?;
            Ok((q2 < 0.0).then_some((k, q, q2)))
        };
        run().transpose()
    });
    let (k, q, q2) = match found {
        Some(r) => r?,
        None => {
            return Err(Error::CertificateNotFound(format!(
                "index value stays non-negative for all {} scanned k on {}",
                k_list.len(),
                chart.label()
            )))
        }
    };
    Ok(InstabilityCertificate {
        surface: chart.label(),
        k,
        delta: None,
        eps0: 0.5 * (e1 - e0),
        c_value: None,
        q_value: q,
        q_value_doubled: q2,
        quad: *quad,
        extra: vec![
            ("u0".to_string(), format!("{:.17e},{:.17e}", u0.0, u0.1)),
            ("phi".to_string(), format!("{phi:?}")),
        ],
    })
}

/// The index value for one `k` without scanning.
pub fn nosing_index_value(
    chart: Arc<dyn Chart>,
    u0: (f64, f64),
    k: f64,
    phi: Profile,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let (e0, e1) = phi.support();
    let ruled = ruled_coordinates(chart.clone(), u0, (e0, e1), (-1.0, 1.0))?;
    nosing_index(|e| jacobi_vertical_quadratic(chart.as_ref(), ruled.gamma(e)?), &phi, k, quad)
}
