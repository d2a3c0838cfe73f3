use rayon::prelude::*;

use super::gauss_tables::{GL16, GL32, GL4, GL8};
use super::sum::CompensatedSum;
use crate::error::{Error, Result};

/// Hard cap on the number of cells the adaptive 1-D driver may reach.
pub const MAX_ADAPTIVE_CELLS: usize = 1 << 20;

/// Composite Gauss-Legendre rule description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub points_per_cell: usize,
    pub cells: (usize, usize),
    /// When set, 1-D integrals double the cell count until two successive
    /// estimates differ by less than this.
    pub adaptive_tol: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            points_per_cell: 16,
            cells: (8, 8),
            adaptive_tol: None,
        }
    }
}

impl QuadratureSpec {
    pub fn new(points_per_cell: usize, cells: (usize, usize)) -> Result<Self> {
        let spec = Self {
            points_per_cell,
            cells,
            adaptive_tol: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_adaptive_tol(mut self, tol: f64) -> Self {
        self.adaptive_tol = Some(tol);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !matches!(self.points_per_cell, 4 | 8 | 16 | 32) {
            return Err(Error::InvalidSpec(format!(
                "points_per_cell must be one of 4, 8, 16, 32 (got {})",
                self.points_per_cell
            )));
        }
        if self.cells.0 == 0 || self.cells.1 == 0 {
            return Err(Error::InvalidSpec("cells must be >= 1 on each axis".into()));
        }
        if let Some(tol) = self.adaptive_tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Error::InvalidSpec("adaptive_tol must be positive".into()));
            }
        }
        Ok(())
    }

    /// Same rule with twice as many cells on each axis.
    pub fn doubled(&self) -> Self {
        Self {
            cells: (self.cells.0 * 2, self.cells.1 * 2),
            ..*self
        }
    }

    fn half_table(&self) -> &'static [(f64, f64)] {
        match self.points_per_cell {
            4 => &GL4,
            8 => &GL8,
            16 => &GL16,
            _ => &GL32,
        }
    }

    /// Nodes and weights of the rule mapped to `[a, b]`, in ascending order.
    fn nodes(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let table = self.half_table();
        let mut out = Vec::with_capacity(2 * table.len());
        for &(x, w) in table.iter().rev() {
            out.push((mid - half * x, half * w));
        }
        for &(x, w) in table.iter() {
            out.push((mid + half * x, half * w));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::NonFinite("integration bounds"));
    }
    if !(a < b) {
        return Err(Error::InvalidSpec(format!("empty interval [{a}, {b}]")));
    }
    Ok(())
}

fn check_breaks(breaks: &[f64]) -> Result<()> {
    if breaks.len() < 2 {
        return Err(Error::InvalidSpec("need at least two breakpoints".into()));
    }
    for w in breaks.windows(2) {
        check_interval(w[0], w[1])?;
    }
    Ok(())
}

fn fixed_1d<F>(f: &F, a: f64, b: f64, spec: &QuadratureSpec, cells: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut acc = CompensatedSum::new();
    let h = (b - a) / cells as f64;
    for i in 0..cells {
        let ca = a + h * i as f64;
        let cb = if i + 1 == cells { b } else { a + h * (i + 1) as f64 };
        for (x, w) in spec.nodes(ca, cb) {
            let v = f(x)?;
            if !v.is_finite() {
                return Err(Error::NonFinite("quadrature sample"));
            }
            acc.add(w * v);
        }
    }
    Ok(acc.total())
}

/// Composite Gauss-Legendre integral of a fallible integrand over `[a, b]`.
pub fn try_gauss_legendre_1d<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    spec.validate()?;
    check_interval(a, b)?;
    let mut cells = spec.cells.0;
    let mut est = fixed_1d(&f, a, b, spec, cells)?;
    let Some(tol) = spec.adaptive_tol else {
        return Ok(est);
    };
    loop {
        if cells * 2 > MAX_ADAPTIVE_CELLS {
            return Err(Error::InvalidSpec(format!(
                "adaptive quadrature did not reach tolerance {tol:e} within {MAX_ADAPTIVE_CELLS} cells"
            )));
        }
        cells *= 2;
        let next = fixed_1d(&f, a, b, spec, cells)?;
        if (next - est).abs() < tol {
            return Ok(next);
        }
        est = next;
    }
}

pub fn gauss_legendre_1d<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    try_gauss_legendre_1d(|x| Ok(f(x)), a, b, spec)
}

/// Sum of composite rules over consecutive intervals `[breaks[i], breaks[i+1]]`.
/// Each interval gets the full cell count of `spec`.
pub fn try_gauss_legendre_1d_breaks<F>(f: F, breaks: &[f64], spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    check_breaks(breaks)?;
    let mut acc = CompensatedSum::new();
    for w in breaks.windows(2) {
        acc.add(try_gauss_legendre_1d(&f, w[0], w[1], spec)?);
    }
    Ok(acc.total())
}

pub fn gauss_legendre_1d_breaks<F>(f: F, breaks: &[f64], spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    try_gauss_legendre_1d_breaks(|x| Ok(f(x)), breaks, spec)
}

/// Tensor-product composite rule over the grid of sub-rectangles spanned by
/// `xb` and `yb`. Columns of cells are evaluated in parallel and reduced in
/// index order, so the result does not depend on the thread count.
pub fn try_integrate_2d_breaks<F>(f: F, xb: &[f64], yb: &[f64], spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    spec.validate()?;
    check_breaks(xb)?;
    check_breaks(yb)?;
    let (nx, ny) = spec.cells;
    let mut xcells = Vec::with_capacity((xb.len() - 1) * nx);
    for w in xb.windows(2) {
        let h = (w[1] - w[0]) / nx as f64;
        for i in 0..nx {
            let b = if i + 1 == nx { w[1] } else { w[0] + h * (i + 1) as f64 };
            xcells.push((w[0] + h * i as f64, b));
        }
    }
    let mut ynodes = Vec::new();
    for w in yb.windows(2) {
        let h = (w[1] - w[0]) / ny as f64;
        for j in 0..ny {
            let b = if j + 1 == ny { w[1] } else { w[0] + h * (j + 1) as f64 };
            ynodes.extend(spec.nodes(w[0] + h * j as f64, b));
        }
    }
    let columns: Vec<Result<f64>> = xcells
        .par_iter()
        .map(|&(a, b)| {
            let mut acc = CompensatedSum::new();
            for (x, wx) in spec.nodes(a, b) {
                for &(y, wy) in &ynodes {
                    let v = f(x, y)?;
                    if !v.is_finite() {
                        return Err(Error::NonFinite("quadrature sample"));
                    }
                    acc.add(wx * wy * v);
                }
            }
            Ok(acc.total())
        })
        .collect();
    let mut acc = CompensatedSum::new();
    for c in columns {
        acc.add(c?);
    }
    Ok(acc.total())
}

pub fn try_integrate_2d<F>(f: F, rect: Rect, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    try_integrate_2d_breaks(f, &[rect.x0, rect.x1], &[rect.y0, rect.y1], spec)
}

pub fn integrate_2d<F>(f: F, rect: Rect, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    try_integrate_2d(|x, y| Ok(f(x, y)), rect, spec)
}

pub fn integrate_2d_breaks<F>(f: F, xb: &[f64], yb: &[f64], spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    try_integrate_2d_breaks(|x, y| Ok(f(x, y)), xb, yb, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec(n: usize, cells: usize) -> QuadratureSpec {
        QuadratureSpec::new(n, (cells, cells)).unwrap()
    }

    #[test]
    fn weights_sum_to_two() {
        for n in [4, 8, 16, 32] {
            let s: f64 = spec(n, 1).nodes(-1.0, 1.0).iter().map(|p| p.1).sum();
            assert!((s - 2.0).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn square_on_unit_interval() {
        let v = gauss_legendre_1d(|x| x * x, 0.0, 1.0, &spec(4, 1)).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn exact_through_degree_2n_minus_1() {
        for n in [4usize, 8, 16, 32] {
            let d = 2 * n - 1;
            let v = gauss_legendre_1d(|x| x.powi(d as i32), 0.0, 1.0, &spec(n, 1)).unwrap();
            let exact = 1.0 / (d as f64 + 1.0);
            assert!(((v - exact) / exact).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn sine_over_full_period() {
        let v = gauss_legendre_1d(f64::sin, 0.0, 2.0 * PI, &spec(16, 4)).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn bracket_integrand_matches_antiderivative() {
        let big_f = |s: f64| 4.0 * s.powi(3) / 3.0 + 3.0 * s + ((2.0 * s - 1.0) / (2.0 * s + 1.0)).ln();
        let g = |s: f64| (16.0 * s.powi(4) + 8.0 * s * s + 1.0) / (4.0 * s * s - 1.0);
        let v = gauss_legendre_1d(g, 1.0, 4.0, &spec(32, 16)).unwrap();
        assert!((v - (big_f(4.0) - big_f(1.0))).abs() < 1e-10);
    }

    #[test]
    fn non_finite_sample_is_rejected() {
        let r = gauss_legendre_1d(|x| 1.0 / (x - x), 0.0, 1.0, &spec(4, 1));
        assert_eq!(r, Err(Error::NonFinite("quadrature sample")));
    }

    #[test]
    fn invalid_specs() {
        assert!(QuadratureSpec::new(5, (1, 1)).is_err());
        assert!(QuadratureSpec::new(4, (0, 1)).is_err());
        assert!(gauss_legendre_1d(|x| x, 1.0, 0.0, &spec(4, 1)).is_err());
    }

    #[test]
    fn adaptive_reaches_tolerance() {
        let s = spec(4, 1).with_adaptive_tol(1e-13);
        let v = gauss_legendre_1d(|x| (10.0 * x).sin(), 0.0, 3.0, &s).unwrap();
        assert!((v - (1.0 - 30f64.cos()) / 10.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_cap_is_reported() {
        let s = spec(4, 1).with_adaptive_tol(1e-300);
        let r = gauss_legendre_1d(|x| x.sqrt(), 0.0, 1.0, &s);
        assert!(matches!(r, Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn constant_over_unit_square() {
        let v = integrate_2d(|_, _| 1.0, Rect::new(0.0, 1.0, 0.0, 1.0), &spec(4, 1)).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn breaks_split_a_kink() {
        let v = gauss_legendre_1d_breaks(|x: f64| x.abs(), &[-1.0, 0.0, 2.0], &spec(4, 1)).unwrap();
        assert!((v - 2.5).abs() < 1e-14);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let f = |x: f64, y: f64| (x * 3.1).sin() * (y * 1.7).cos() + x * y;
        let r = Rect::new(0.0, 2.0, -1.0, 1.5);
        let s = spec(8, 13);
        let a = integrate_2d(f, r, &s).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| integrate_2d(f, r, &s).unwrap());
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
