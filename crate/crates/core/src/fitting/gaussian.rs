use crate::error::{Error, Result};

use super::regression::{polyfit_quadratic, QuadraticFit};

pub const DEFAULT_GRID_STEPS: usize = 256;

/// `v(d) = l + exp(-m d^2 + p d + q)` with `m > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTypeParams {
    pub l: f64,
    pub m: f64,
    pub p: f64,
    pub q: f64,
}

impl GaussianTypeParams {
    pub fn new(l: f64, m: f64, p: f64, q: f64) -> Result<Self> {
        if [l, m, p, q].iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("Gaussian-type parameters must be finite".into()));
        }
        if m <= 0.0 {
            return Err(Error::NonDecayingFit { m });
        }
        Ok(Self { l, m, p, q })
    }

    pub fn eval(&self, d: f64) -> f64 {
        self.l + self.log_excess(d).exp()
    }

    /// `log(v(d) - l)`, the quadratic the fit works with.
    pub fn log_excess(&self, d: f64) -> f64 {
        (-self.m * d + self.p) * d + self.q
    }

    /// Abscissa of the maximum, `p / (2m)`.
    pub fn vertex(&self) -> f64 {
        self.p / (2.0 * self.m)
    }

    fn from_quadratic(l: f64, fit: &QuadraticFit) -> Result<Self> {
        Self::new(l, -fit.a, fit.b, fit.c)
    }
}

/// How the offset `l` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OffsetMode {
    Fixed(f64),
    /// `steps` uniform candidates from `lo` up to, but excluding,
    /// `min(hi, min(vs))`; the one with the smallest squared error in
    /// original units wins.
    GridSearch {
        lo: f64,
        hi: f64,
        steps: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianFit {
    pub params: GaussianTypeParams,
    /// Sum of squared residuals in original units.
    pub sse: f64,
    /// Number of grid candidates that produced a decaying fit.
    pub feasible_candidates: usize,
}

pub fn fit_gaussian_type(ds: &[f64], vs: &[f64], offset: OffsetMode) -> Result<GaussianFit> {
    if ds.len() != vs.len() {
        return Err(Error::InvalidParameter("doses and values differ in length".into()));
    }
    if vs.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite value".into()));
    }
    match offset {
        OffsetMode::Fixed(l) => {
            let params = fit_with_offset(ds, vs, l)?;
            Ok(GaussianFit { params, sse: sse(&params, ds, vs), feasible_candidates: 1 })
        }
        OffsetMode::GridSearch { lo, hi, steps } => {
            if steps == 0 || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidParameter("grid search needs finite bounds and steps > 0".into()));
            }
            let vmin = vs.iter().copied().fold(f64::INFINITY, f64::min);
            let ub = hi.min(vmin);
            if !(lo < ub) {
                return Err(Error::NoFeasibleOffset(format!(
                    "no candidate in [{lo}, {ub}) keeps every value above the offset"
                )));
            }
            let mut best: Option<(GaussianTypeParams, f64)> = None;
            let mut feasible = 0;
            for k in 0..steps {
                let l = lo + (ub - lo) * k as f64 / steps as f64;
                let params = match fit_with_offset(ds, vs, l) {
                    Ok(p) => p,
                    Err(Error::NoFeasibleOffset(_) | Error::NonDecayingFit { .. }) => continue,
                    Err(e) => return Err(e),
                };
                feasible += 1;
                let s = sse(&params, ds, vs);
                if best.as_ref().is_none_or(|(_, b)| s < *b) {
                    best = Some((params, s));
                }
            }
            let (params, sse) = best
                .ok_or_else(|| Error::NoFeasibleOffset(format!("no offset in [{lo}, {ub}) yields a decaying fit")))?;
            Ok(GaussianFit { params, sse, feasible_candidates: feasible })
        }
    }
}

fn fit_with_offset(ds: &[f64], vs: &[f64], l: f64) -> Result<GaussianTypeParams> {
    if let Some(v) = vs.iter().find(|&&v| !(v - l > 0.0)) {
        return Err(Error::NoFeasibleOffset(format!("value {v} does not exceed offset {l}")));
    }
    let logs: Vec<f64> = vs.iter().map(|v| (v - l).ln()).collect();
    let q = polyfit_quadratic(ds, &logs)?;
    GaussianTypeParams::from_quadratic(l, &q)
}

fn sse(params: &GaussianTypeParams, ds: &[f64], vs: &[f64]) -> f64 {
    ds.iter().zip(vs).map(|(&d, &v)| (params.eval(d) - v).powi(2)).sum()
}
