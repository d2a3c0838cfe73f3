use crate::error::{Error, Result};

/// Central-difference step plus number of Richardson halvings (0 to 2).
/// Truncation error of the combined estimate is O(step^(2 + 2·levels)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffSpec {
    pub step: f64,
    pub richardson_levels: usize,
}

impl Default for DiffSpec {
    fn default() -> Self {
        Self {
            step: 1e-3,
            richardson_levels: 1,
        }
    }
}

impl DiffSpec {
    pub fn new(step: f64, richardson_levels: usize) -> Result<Self> {
        let s = Self {
            step,
            richardson_levels,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidSpec(format!("step must be positive (got {})", self.step)));
        }
        if self.richardson_levels > 2 {
            return Err(Error::InvalidSpec("richardson_levels must be 0, 1 or 2".into()));
        }
        Ok(())
    }
}

/// Central first or second derivative of a vector-valued function, with
/// Richardson extrapolation over halved steps.
pub fn central_diff_n<const N: usize, F>(f: F, x: f64, spec: &DiffSpec, order: u8) -> Result<[f64; N]>
where
    F: Fn(f64) -> Result<[f64; N]>,
{
    spec.validate()?;
    let stencil = |h: f64| -> Result<[f64; N]> {
        let mut out = [0.0; N];
        match order {
            1 => {
                let (p, m) = (f(x + h)?, f(x - h)?);
                for k in 0..N {
                    out[k] = (p[k] - m[k]) / (2.0 * h);
                }
            }
            2 => {
                let (p, c, m) = (f(x + h)?, f(x)?, f(x - h)?);
                for k in 0..N {
                    out[k] = (p[k] - 2.0 * c[k] + m[k]) / (h * h);
                }
            }
            _ => return Err(Error::InvalidSpec(format!("derivative order must be 1 or 2 (got {order})"))),
        }
        Ok(out)
    };
    let levels = spec.richardson_levels;
    let mut t = Vec::with_capacity(levels + 1);
    for j in 0..=levels {
        t.push(stencil(spec.step / f64::powi(2.0, j as i32))?);
    }
    let mut pow4 = 4.0;
    for _m in 1..=levels {
        let mut next = Vec::with_capacity(t.len() - 1);
        for j in 1..t.len() {
            let mut e = [0.0; N];
            for k in 0..N {
                e[k] = t[j][k] + (t[j][k] - t[j - 1][k]) / (pow4 - 1.0);
            }
            next.push(e);
        }
        t = next;
        pow4 *= 4.0;
    }
    let out = t[0];
    if out.iter().all(|v| v.is_finite()) {
        Ok(out)
    } else {
        Err(Error::NonFinite("central difference"))
    }
}

pub fn try_central_diff<F>(f: F, x: f64, spec: &DiffSpec, order: u8) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    central_diff_n(|s| Ok([f(s)?]), x, spec, order).map(|v| v[0])
}

pub fn central_diff<F>(f: F, x: f64, spec: &DiffSpec, order: u8) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    try_central_diff(|s| Ok(f(s)), x, spec, order)
}
