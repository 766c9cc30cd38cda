use crate::error::{Error, Result};
use crate::logistic::{params_from_inflection, InflectionData, LogisticParams};

use super::regression::{linreg, RegressionMode};

/// Number of points in the sign-change scan for the lower asymptote.
pub const L1_SCAN_POINTS: usize = 512;
const BISECTION_WIDTH: f64 = 1e-12;

/// Steepest-secant approximation of the inflection point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InflectionApprox {
    /// Zero-based index `i` of the selected interval `[x_i, x_{i+1}]`.
    pub index_n_theta: usize,
    pub theta_n: f64,
    pub gamma_n: f64,
    pub delta_n: f64,
}

impl InflectionApprox {
    pub fn as_inflection(&self) -> InflectionData {
        InflectionData { theta: self.theta_n, f_theta: self.gamma_n, f_prime_theta: self.delta_n }
    }
}

/// What is known about the asymptotes before fitting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Knowledge {
    BothKnown { l1: f64, l2: f64 },
    L1Known { l1: f64 },
    NoneKnown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    BothKnown,
    L1Known,
    NoneKnown,
}

impl Knowledge {
    pub fn regime(&self) -> Regime {
        match self {
            Knowledge::BothKnown { .. } => Regime::BothKnown,
            Knowledge::L1Known { .. } => Regime::L1Known,
            Knowledge::NoneKnown => Regime::NoneKnown,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FitOptions {
    pub regression: RegressionMode,
    /// Lower end of the root scan for the lower asymptote. Defaults to
    /// `y1 - 10 (gamma_n - y1)` in the working (increasing) orientation.
    pub bracket_lo: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFitReport {
    pub regime: Regime,
    /// Steepest secant of the input data, in the input orientation.
    pub inflection: InflectionApprox,
    /// Residual of the asymptote equation at the returned root
    /// (`NoneKnown` only).
    pub l1_equation_residual: Option<f64>,
    /// True when decreasing data was mirrored to fit the increasing branch.
    pub mirrored: bool,
    /// Amount subtracted from the abscissae so the first one is zero.
    pub shift: f64,
    /// Sum of squared differences between the fitted curve and the data.
    pub sse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    pub params: LogisticParams,
    pub report: LogisticFitReport,
}

/// `log(1/(y - l1) - 1/(l2 - l1))`; maps `f(x)` to `m x + p`.
pub fn phi_transform(y: f64, l1: f64, l2: f64) -> Result<f64> {
    if !(y > l1 && y < l2) {
        return Err(Error::Domain(format!("{y} lies outside ({l1}, {l2})")));
    }
    let arg = 1.0 / (y - l1) - 1.0 / (l2 - l1);
    if !(arg > 0.0) {
        return Err(Error::Domain(format!("{y} is too close to the upper asymptote {l2}")));
    }
    Ok(arg.ln())
}

/// Regression of `phi_transform(y)` on `x` with both asymptotes fixed.
pub fn fit_known_limits(xs: &[f64], ys: &[f64], l1: f64, l2: f64, mode: RegressionMode) -> Result<LogisticParams> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidParameter("abscissae and ordinates differ in length".into()));
    }
    let zs = ys.iter().map(|&y| phi_transform(y, l1, l2)).collect::<Result<Vec<_>>>()?;
    let r = linreg(xs, &zs, mode)?;
    // The regression reports the line as `p - m x`; the transform is `m x + p`.
    LogisticParams::new(-r.slope_estimate, r.intercept_estimate, l1, l2)
}

/// Picks the interval with the steepest secant; ties go to the first one.
pub fn detect_inflection(xs: &[f64], ys: &[f64]) -> Result<InflectionApprox> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidParameter("abscissae and ordinates differ in length".into()));
    }
    if xs.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: xs.len() });
    }
    check_increasing(xs)?;
    let mut best = 0;
    let mut best_slope = f64::NEG_INFINITY;
    for i in 0..xs.len() - 1 {
        let s = ((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).abs();
        if s > best_slope {
            best = i;
            best_slope = s;
        }
    }
    let i = best;
    Ok(InflectionApprox {
        index_n_theta: i,
        theta_n: 0.5 * (xs[i + 1] + xs[i]),
        gamma_n: 0.5 * (ys[i + 1] + ys[i]),
        delta_n: (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]),
    })
}

/// `(gamma_n - y1)/(y1 - l1) + 1/2 - exp(2 theta_n delta_n / (gamma_n - l1))/2`.
pub fn l1_equation_residual(l1: f64, y1: f64, approx: &InflectionApprox) -> f64 {
    let g = approx.gamma_n;
    (g - y1) / (y1 - l1) + 0.5 - 0.5 * (2.0 * approx.theta_n * approx.delta_n / (g - l1)).exp()
}

fn l1_equation_derivative(l1: f64, y1: f64, approx: &InflectionApprox) -> f64 {
    let g = approx.gamma_n;
    let k = 2.0 * approx.theta_n * approx.delta_n;
    (g - y1) / (y1 - l1).powi(2) - 0.5 * (k / (g - l1)).exp() * k / (g - l1).powi(2)
}

/// Root of [`l1_equation_residual`] below `y1`.
///
/// The residual is sampled on a uniform grid from just below `y1` down to
/// `bracket_lo`; the first sign change met from the top is bisected to a
/// width of 1e-12 and polished with one Newton step.
pub fn solve_l1(y1: f64, approx: &InflectionApprox, bracket_lo: Option<f64>) -> Result<f64> {
    if !(y1 < approx.gamma_n) {
        return Err(Error::Domain(format!(
            "first observation {y1} must lie below the midpoint ordinate {}",
            approx.gamma_n
        )));
    }
    let lo = bracket_lo.unwrap_or(y1 - 10.0 * (approx.gamma_n - y1));
    if !(lo < y1) || !lo.is_finite() {
        return Err(Error::InvalidParameter(format!("bracket_lo {lo} must be finite and below {y1}")));
    }
    let hi = y1 - 1e-9 * (y1 - lo);
    let f = |l: f64| l1_equation_residual(l, y1, approx);
    let step = (hi - lo) / (L1_SCAN_POINTS - 1) as f64;
    let grid = |k: usize| if k == 0 { hi } else { hi - step * k as f64 };

    let mut any_finite = false;
    let mut upper: Option<(f64, f64)> = None;
    let mut bracket = None;
    for k in 0..L1_SCAN_POINTS {
        let l = if k == L1_SCAN_POINTS - 1 { lo } else { grid(k) };
        let v = f(l);
        if !v.is_finite() {
            upper = None;
            continue;
        }
        any_finite = true;
        if v == 0.0 {
            return Ok(l);
        }
        if let Some((lu, vu)) = upper {
            if vu.signum() != v.signum() {
                bracket = Some((l, lu, v));
                break;
            }
        }
        upper = Some((l, v));
    }
    if !any_finite {
        return Err(Error::NonFinite("asymptote equation overflows on the whole scan".into()));
    }
    let (mut a, mut b, mut fa) = bracket.ok_or(Error::NoBracket { lo, hi })?;

    while b - a > BISECTION_WIDTH * a.abs().max(1.0) {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    let d = l1_equation_derivative(mid, y1, approx);
    let newton = mid - fm / d;
    if newton.is_finite() && newton > a && newton < b && f(newton).abs() <= fm.abs() {
        Ok(newton)
    } else {
        Ok(mid)
    }
}

/// Fits a logistic curve to `(xs, ys)` under the given asymptote knowledge.
///
/// Abscissae must be strictly increasing. They are shifted so that the first
/// one is zero and the offset is folded back into `p` afterwards, which is
/// exact for this family.
pub fn fit_logistic(xs: &[f64], ys: &[f64], knowledge: Knowledge, opts: &FitOptions) -> Result<LogisticFit> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidParameter("abscissae and ordinates differ in length".into()));
    }
    if xs.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: xs.len() });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite input".into()));
    }
    check_increasing(xs)?;
    let shift = xs[0];
    let xs0: Vec<f64> = xs.iter().map(|x| x - shift).collect();
    let inflection = detect_inflection(&xs0, ys)?;

    let (fitted, l1_eq, mirrored) = match knowledge {
        Knowledge::BothKnown { l1, l2 } => (fit_known_limits(&xs0, ys, l1, l2, opts.regression)?, None, false),
        Knowledge::L1Known { l1 } => {
            let l2 = 2.0 * inflection.gamma_n - l1;
            if !(l2 > l1) {
                return Err(Error::Domain(format!("estimated upper asymptote {l2} does not exceed l1 = {l1}")));
            }
            (fit_known_limits(&xs0, ys, l1, l2, opts.regression)?, None, false)
        }
        Knowledge::NoneKnown => {
            let (params, residual, mirrored) = fit_none_known(&xs0, ys, opts)?;
            (params, Some(residual), mirrored)
        }
    };
    let params = LogisticParams::new(fitted.m, fitted.p - fitted.m * shift, fitted.l1, fitted.l2)?;
    let sse = xs.iter().zip(ys).map(|(&x, &y)| (params.eval(x) - y).powi(2)).sum();
    let inflection = InflectionApprox { theta_n: inflection.theta_n + shift, ..inflection };
    Ok(LogisticFit {
        params,
        report: LogisticFitReport {
            regime: knowledge.regime(),
            inflection,
            l1_equation_residual: l1_eq,
            mirrored,
            shift,
            sse,
        },
    })
}

fn fit_none_known(xs: &[f64], ys: &[f64], opts: &FitOptions) -> Result<(LogisticParams, f64, bool)> {
    let increasing = ys[1] > ys[0];
    for i in 0..ys.len() - 1 {
        let ok = if increasing { ys[i + 1] > ys[i] } else { ys[i + 1] < ys[i] };
        if !ok {
            return Err(Error::NonMonotoneData { index: i + 1 });
        }
    }
    // Decreasing data is reflected through its midrange onto the increasing
    // branch: c - f is logistic with asymptotes (c - l2, c - l1), slope -m
    // and offset -p - 2 log(l2 - l1).
    let c = ys[0] + ys[ys.len() - 1];
    let work: Vec<f64> = if increasing { ys.to_vec() } else { ys.iter().map(|y| c - y).collect() };

    let approx = detect_inflection(xs, &work)?;
    let y1 = work[0];
    let l1 = solve_l1(y1, &approx, opts.bracket_lo)?;
    let residual = l1_equation_residual(l1, y1, &approx);
    let p = params_from_inflection(l1, y1, &approx.as_inflection())?;
    if increasing {
        Ok((p, residual, false))
    } else {
        let span = p.span();
        let back = LogisticParams::new(-p.m, -p.p - 2.0 * span.ln(), c - p.l2, c - p.l1)?;
        Ok((back, residual, true))
    }
}

fn check_increasing(xs: &[f64]) -> Result<()> {
    match xs.windows(2).position(|w| !(w[1] > w[0])) {
        Some(i) => Err(Error::NonMonotoneAbscissae { index: i + 1 }),
        None => Ok(()),
    }
}
