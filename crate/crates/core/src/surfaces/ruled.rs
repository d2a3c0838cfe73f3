use std::sync::Arc;

use super::{s_flow, surface_frame, Chart, ChartJet, SurfaceFrame};
use crate::error::{Error, Result};
use crate::group::{frame_to_euclid, Point};
use crate::numerics::{central_diff_n, DiffSpec, Rect};

/// Spacing of stored nodes along Γ and number of RK4 substeps per spacing.
const NODE_STEP: f64 = 1e-2;
const SUBSTEPS: usize = 4;

/// Chart `F(ε, s) = Γ(ε) + s·Z_{Γ(ε)}` built from the integral curve Γ of S
/// through a regular point of a base chart. Coordinates are `(ε, s)`; ε is
/// arclength along Γ and s arclength along the characteristic lines.
/// `F_ε × F_s = S × Z = N` along Γ, so the base orientation is inherited.
pub struct RuledChart {
    base: Arc<dyn Chart>,
    /// Base-chart coordinates of Γ at `ε = (k0 + k)·NODE_STEP`.
    nodes: Vec<(f64, f64)>,
    k0: i64,
    domain: Rect,
    diff: DiffSpec,
}

fn stopped(e: Error, steps: usize) -> Error {
    match e {
        Error::SingularPoint { .. } => Error::StoppedAtSingular { steps },
        other => other,
    }
}

/// Builds the ruled chart around `u0` covering `eps_range × s_range`.
pub fn ruled_coordinates(
    chart: Arc<dyn Chart>,
    u0: (f64, f64),
    eps_range: (f64, f64),
    s_range: (f64, f64),
) -> Result<RuledChart> {
    if !(eps_range.0 < eps_range.1 && s_range.0 < s_range.1) {
        return Err(Error::InvalidSpec("ruled chart ranges must be nondegenerate".into()));
    }
    surface_frame(chart.as_ref(), u0).map_err(|e| stopped(e, 0))?;
    let margin = 0.05;
    let k_lo = ((eps_range.0.min(0.0) - margin) / NODE_STEP).floor() as i64;
    let k_hi = ((eps_range.1.max(0.0) + margin) / NODE_STEP).ceil() as i64;
    let h = NODE_STEP / SUBSTEPS as f64;
    let walk = |dir: f64, count: i64| -> Result<Vec<(f64, f64)>> {
        let mut u = u0;
        let mut out = Vec::with_capacity(count as usize);
        for k in 0..count {
            for _ in 0..SUBSTEPS {
                u = s_flow(chart.as_ref(), u, dir * h).map_err(|e| stopped(e, k as usize))?;
            }
            out.push(u);
        }
        Ok(out)
    };
    let fwd = walk(1.0, k_hi)?;
    let mut bwd = walk(-1.0, -k_lo)?;
    bwd.reverse();
    let mut nodes = bwd;
    nodes.push(u0);
    nodes.extend(fwd);
    Ok(RuledChart {
        base: chart,
        nodes,
        k0: k_lo,
        domain: Rect::new(eps_range.0, eps_range.1, s_range.0, s_range.1),
        diff: DiffSpec { step: 1e-3, richardson_levels: 1 },
    })
}

impl RuledChart {
    pub fn base(&self) -> &dyn Chart {
        self.base.as_ref()
    }

    fn node_index(&self, eps: f64) -> Result<usize> {
        let k = (eps / NODE_STEP).round() as i64 - self.k0;
        if k < 0 || k as usize >= self.nodes.len() {
            return Err(Error::Domain(format!("ε = {eps} outside the integrated part of Γ")));
        }
        Ok(k as usize)
    }

    /// Base-chart coordinates of Γ(eps), integrated from the node nearest `center`.
    fn gamma_from(&self, center: f64, eps: f64) -> Result<(f64, f64)> {
        let k = self.node_index(center)?;
        let e_k = (k as i64 + self.k0) as f64 * NODE_STEP;
        let h = (eps - e_k) / SUBSTEPS as f64;
        let mut u = self.nodes[k];
        if h != 0.0 {
            for i in 0..SUBSTEPS {
                u = s_flow(self.base.as_ref(), u, h).map_err(|e| stopped(e, i))?;
            }
        }
        Ok(u)
    }

    /// Base-chart coordinates of Γ(eps).
    pub fn gamma(&self, eps: f64) -> Result<(f64, f64)> {
        self.gamma_from(eps, eps)
    }

    /// Frame of the base chart at Γ(eps).
    pub fn base_frame(&self, eps: f64) -> Result<SurfaceFrame> {
        surface_frame(self.base.as_ref(), self.gamma(eps)?).map_err(|e| stopped(e, 0))
    }

    fn zs_at(&self, center: f64, eps: f64) -> Result<(Point, [f64; 3], [f64; 3])> {
        let u = self.gamma_from(center, eps)?;
        let f = surface_frame(self.base.as_ref(), u).map_err(|e| stopped(e, 0))?;
        Ok((f.point, frame_to_euclid(f.point, f.z), frame_to_euclid(f.point, f.s)))
    }
}

impl Chart for RuledChart {
    fn domain(&self) -> Rect {
        self.domain
    }

    fn jet(&self, eps: f64, s: f64) -> Result<ChartJet> {
        if !(eps.is_finite() && s.is_finite()) {
            return Err(Error::NonFinite("chart parameters"));
        }
        let (g, z, sv) = self.zs_at(eps, eps)?;
        let d1 = central_diff_n(
            |e| {
                let (_, z, s) = self.zs_at(eps, e)?;
                Ok([z[0], z[1], z[2], s[0], s[1], s[2]])
            },
            eps,
            &self.diff,
            1,
        )?;
        let dzz = central_diff_n(|e| Ok(self.zs_at(eps, e)?.1), eps, &self.diff, 2)?;
        let dz = [d1[0], d1[1], d1[2]];
        let ds = [d1[3], d1[4], d1[5]];
        let f = |k: usize| g.to_array()[k] + s * z[k];
        Ok(ChartJet {
            p: Point::new(f(0), f(1), f(2)),
            f1: std::array::from_fn(|k| sv[k] + s * dz[k]),
            f2: z,
            f11: std::array::from_fn(|k| ds[k] + s * dzz[k]),
            f12: dz,
            f22: [0.0; 3],
        })
    }

    fn is_minimal(&self) -> bool {
        self.base.is_minimal()
    }

    fn label(&self) -> String {
        format!("ruled chart over {}", self.base.label())
    }
}
