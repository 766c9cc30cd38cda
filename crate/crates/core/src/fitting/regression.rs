use crate::error::{Error, Result};

/// Which normalisation the simple linear regression uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RegressionMode {
    /// Ordinary least squares (centering by `1/n`).
    #[default]
    Standard,
    /// The printed estimator with `1/(n-1)` in place of `1/n` in both the
    /// centering and the intercept. Not exact on noiseless lines and
    /// singular for some two-point designs.
    Legacy,
}

/// Estimates for the line `z = p - m x`: `slope_estimate` is `m`,
/// `intercept_estimate` is `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinRegResult {
    pub slope_estimate: f64,
    pub intercept_estimate: f64,
}

pub fn linreg(xs: &[f64], zs: &[f64], mode: RegressionMode) -> Result<LinRegResult> {
    check_lengths(xs, zs, 2)?;
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sz: f64 = zs.iter().sum();
    if xs.iter().all(|&x| x == xs[0]) {
        return Err(Error::SingularDesign("all abscissae are equal".into()));
    }
    let (m, p) = match mode {
        RegressionMode::Standard => {
            let xbar = sx / n;
            let zbar = sz / n;
            let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
            let sxz: f64 = xs.iter().zip(zs).map(|(x, z)| (x - xbar) * (z - zbar)).sum();
            let m = -sxz / sxx;
            (m, zbar + m * xbar)
        }
        RegressionMode::Legacy => {
            let n1 = n - 1.0;
            let sxx: f64 = xs.iter().map(|x| x * x).sum();
            let sxz: f64 = xs.iter().zip(zs).map(|(x, z)| x * z).sum();
            let den = -sx * sx / n1 + sxx;
            if den.abs() <= 1e-12 * sxx.max(f64::MIN_POSITIVE) {
                return Err(Error::SingularDesign(format!("regression denominator vanishes ({den})")));
            }
            let m = -(-sx * sz / n1 + sxz) / den;
            (m, sz / n1 + m * sx / n1)
        }
    };
    if !m.is_finite() || !p.is_finite() {
        return Err(Error::NonFinite("regression estimates".into()));
    }
    Ok(LinRegResult { slope_estimate: m, intercept_estimate: p })
}

/// `y = a x^2 + b x + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadraticFit {
    pub fn eval(&self, x: f64) -> f64 {
        (self.a * x + self.b) * x + self.c
    }
}

/// Degree-two least squares through the 3x3 normal equations.
pub fn polyfit_quadratic(xs: &[f64], ys: &[f64]) -> Result<QuadraticFit> {
    check_lengths(xs, ys, 3)?;
    let mut distinct: Vec<f64> = xs.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::SingularDesign(format!("quadratic fit needs 3 distinct abscissae, got {}", distinct.len())));
    }
    // Power sums s[k] = sum x^k, moments t[k] = sum x^k y.
    let mut s = [0.0f64; 5];
    let mut t = [0.0f64; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let mut xp = 1.0;
        for (k, sk) in s.iter_mut().enumerate() {
            *sk += xp;
            if k < 3 {
                t[k] += xp * y;
            }
            xp *= x;
        }
    }
    // Unknowns ordered (c, b, a).
    let mut a = [[s[0], s[1], s[2], t[0]], [s[1], s[2], s[3], t[1]], [s[2], s[3], s[4], t[2]]];
    let sol = solve3(&mut a).ok_or_else(|| Error::SingularDesign("normal equations are singular".into()))?;
    Ok(QuadraticFit { a: sol[2], b: sol[1], c: sol[0] })
}

/// Gaussian elimination with partial pivoting on an augmented 3x4 system.
fn solve3(a: &mut [[f64; 4]; 3]) -> Option<[f64; 3]> {
    let scale = a.iter().flat_map(|r| r[..3].iter()).fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-14 * scale {
            return None;
        }
        a.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (dst, src) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= f * src;
            }
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (a[row][3] - tail) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn check_lengths(xs: &[f64], ys: &[f64], min: usize) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidParameter(format!(
            "abscissae and ordinates differ in length ({} vs {})",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < min {
        return Err(Error::TooFewPoints { needed: min, got: xs.len() });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite input".into()));
    }
    Ok(())
}
