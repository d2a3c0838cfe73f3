use crate::error::{Error, Result};

/// Least-squares fit `y ≈ c0 + c1 s + c2 s²`. Returns the coefficients and the
/// largest absolute residual over the samples.
pub fn fit_quadratic(samples: &[(f64, f64)]) -> Result<([f64; 3], f64)> {
    if samples.len() < 3 {
        return Err(Error::InvalidSpec("quadratic fit needs at least three samples".into()));
    }
    // normal equations on centred, scaled abscissae for conditioning
    let n = samples.len() as f64;
    let mean = samples.iter().map(|p| p.0).sum::<f64>() / n;
    let scale = samples.iter().map(|p| (p.0 - mean).abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut m = [[0.0; 3]; 3];
    let mut r = [0.0; 3];
    for &(s, y) in samples {
        let u = (s - mean) / scale;
        let b = [1.0, u, u * u];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += b[i] * b[j];
            }
            r[i] += b[i] * y;
        }
    }
    let c = solve3(m, r).ok_or_else(|| Error::Domain("degenerate abscissae in quadratic fit".into()))?;
    // back to powers of s
    let (k, q) = (mean, scale);
    let c2 = c[2] / (q * q);
    let c1 = c[1] / q - 2.0 * c2 * k;
    let c0 = c[0] - c[1] * k / q + c2 * k * k;
    let coef = [c0, c1, c2];
    let resid = samples
        .iter()
        .map(|&(s, y)| (y - (c[0] + c[1] * (s - k) / q + c[2] * ((s - k) / q).powi(2))).abs())
        .fold(0.0, f64::max);
    Ok((coef, resid))
}

fn solve3(m: [[f64; 3]; 3], r: [f64; 3]) -> Option<[f64; 3]> {
    let det = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det(m);
    if d.abs() < 1e-300 {
        return None;
    }
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let mut a = m;
        for i in 0..3 {
            a[i][k] = r[i];
        }
        *o = det(a) / d;
    }
    Some(out)
}
