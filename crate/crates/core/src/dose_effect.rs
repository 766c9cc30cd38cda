//! Dose-effect model: a logistic mean curve, a dispersion curve and a
//! skewness curve, read together as a skew-normal law at every dose.

use std::fmt;

use crate::error::{Error, Result};
use crate::fitting::GaussianTypeParams;
use crate::logistic::LogisticParams;
use crate::skew_normal::{params_of_moments, sn_sample, MomentTriple, SkewNormalParams, SkewnessPolicy};
use crate::trial_io::SummaryRow;

/// Resolution of the dose grids used for assumption checks and dose search.
pub const DOSE_GRID: usize = 1024;

/// Default relative tolerance for calling the initial dispersion segment constant.
pub const DEFAULT_CONSTANT_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaCurve {
    Logistic(LogisticParams),
    /// Offset is always zero so that the dispersion vanishes at large doses.
    GaussianType(GaussianTypeParams),
}

impl SigmaCurve {
    pub fn eval(&self, d: f64) -> f64 {
        match self {
            SigmaCurve::Logistic(p) => p.eval(d),
            SigmaCurve::GaussianType(g) => g.eval(d),
        }
    }

    /// Value approached as the dose grows without bound.
    pub fn limit_at_infinity(&self) -> f64 {
        match self {
            SigmaCurve::Logistic(p) => p.limits().1,
            SigmaCurve::GaussianType(g) => g.l,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoseEffectModel {
    pub mu_curve: LogisticParams,
    pub sigma_curve: SigmaCurve,
    pub gamma_curve: GaussianTypeParams,
    /// Design dose from which the observed dispersion decreases.
    pub d0_hat: f64,
}

impl DoseEffectModel {
    pub fn new(
        mu_curve: LogisticParams,
        sigma_curve: SigmaCurve,
        gamma_curve: GaussianTypeParams,
        d0_hat: f64,
    ) -> Result<Self> {
        if let SigmaCurve::GaussianType(g) = sigma_curve {
            if g.l != 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "Gaussian-type dispersion curve must have offset 0, got {}",
                    g.l
                )));
            }
        }
        if !d0_hat.is_finite() || d0_hat < 0.0 {
            return Err(Error::InvalidParameter(format!("d0_hat must be a nonnegative dose, got {d0_hat}")));
        }
        Ok(Self { mu_curve, sigma_curve, gamma_curve, d0_hat })
    }

    pub fn moments_at(&self, d: f64) -> Result<MomentTriple> {
        check_dose(d)?;
        MomentTriple::new(self.mu_curve.eval(d), self.sigma_curve.eval(d), self.gamma_curve.eval(d))
    }

    pub fn params_at(&self, d: f64) -> Result<DoseReport> {
        let m = self.moments_at(d)?;
        let inv = params_of_moments(&m, SkewnessPolicy::Clamp)?;
        Ok(DoseReport {
            dose: d,
            mean: m.mu,
            sd: m.sigma,
            skewness: m.gamma,
            skew_params: inv.params,
            clamped: inv.clamped,
        })
    }

    /// `n` draws of the effect at dose `d`.
    ///
    /// The generator is keyed by `seed ^ mix(d)`, so one seed gives distinct
    /// streams at distinct doses and the same stream for the same dose.
    pub fn simulate(&self, d: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::InvalidParameter("sample size must be at least 1".into()));
        }
        let report = self.params_at(d)?;
        Ok(sn_sample(&report.skew_params, substream_seed(seed, d), n))
    }
}

fn check_dose(d: f64) -> Result<()> {
    if d.is_finite() && d >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("dose must be finite and nonnegative, got {d}")))
    }
}

/// splitmix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn substream_seed(seed: u64, dose: f64) -> u64 {
    // +0.0 and -0.0 name the same dose.
    let bits = if dose == 0.0 { 0 } else { dose.to_bits() };
    seed ^ mix64(bits)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoseReport {
    pub dose: f64,
    pub mean: f64,
    pub sd: f64,
    pub skewness: f64,
    pub skew_params: SkewNormalParams,
    pub clamped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaShape {
    /// Flat before the maximum: model the dispersion with a logistic curve.
    ConstantThenDecreasing,
    /// Rising before the maximum: model it with a Gaussian-type curve.
    IncreasingThenDecreasing,
}

impl fmt::Display for SigmaShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SigmaShape::ConstantThenDecreasing => "logistic",
            SigmaShape::IncreasingThenDecreasing => "gaussian",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaClassification {
    pub shape: SigmaShape,
    pub d0_hat: f64,
    pub d0_index: usize,
}

/// Splits the observed dispersion at its (last) maximum and classifies the
/// segment before it as flat or rising.
///
/// The head counts as flat when `max - min <= tol_rel * mean` over it; an
/// empty or single-point head is flat.
pub fn classify_sigma_shape(doses: &[f64], sd_hats: &[f64], tol_rel: f64) -> Result<SigmaClassification> {
    if doses.len() != sd_hats.len() {
        return Err(Error::InvalidParameter("doses and standard deviations differ in length".into()));
    }
    if doses.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: doses.len() });
    }
    if let Some(i) = doses.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::NonMonotoneAbscissae { index: i + 1 });
    }
    let max = sd_hats.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let top = sd_hats.iter().rposition(|&s| s == max).ok_or(Error::NoDecreasingTail)?;
    if top + 1 == sd_hats.len() {
        return Err(Error::NoDecreasingTail);
    }
    let head = &sd_hats[..top];
    let flat = if head.len() < 2 {
        true
    } else {
        let lo = head.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = head.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = head.iter().sum::<f64>() / head.len() as f64;
        hi - lo <= tol_rel * mean.abs()
    };
    Ok(SigmaClassification {
        shape: if flat { SigmaShape::ConstantThenDecreasing } else { SigmaShape::IncreasingThenDecreasing },
        d0_hat: doses[top],
        d0_index: top,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClauseResult {
    pub passed: bool,
    pub first_violation: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssumptionReport {
    /// Start of the interval on which the decrease was checked.
    pub decreasing_from: f64,
    pub decreasing: ClauseResult,
    pub sigma_at_horizon: f64,
    pub limit_at_infinity: f64,
    pub vanishing: ClauseResult,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.decreasing.passed && self.vanishing.passed
    }
}

/// Checks that the dispersion eventually decreases and tends to zero.
///
/// The decrease is checked on a 1024-point grid from `d0_hat`, or from the
/// curve's own maximum when a Gaussian-type curve peaks after `d0_hat`, up
/// to `horizon`. Consecutive grid values must not rise and must not stay
/// flat while positive; underflow to zero is allowed. The vanishing clause
/// asks for `sigma(horizon) < eps`.
pub fn check_assumptions(model: &DoseEffectModel, horizon: f64, eps: f64) -> Result<AssumptionReport> {
    let start = match model.sigma_curve {
        SigmaCurve::GaussianType(g) => model.d0_hat.max(g.vertex()),
        SigmaCurve::Logistic(_) => model.d0_hat,
    };
    if !(horizon > start) {
        return Err(Error::InvalidParameter(format!("horizon {horizon} must exceed {start}")));
    }
    let sigma = |d: f64| model.sigma_curve.eval(d);
    let grid = uniform_grid(start, horizon, DOSE_GRID);
    let floor = model.sigma_curve.limit_at_infinity();
    let at_floor_tol = 1e-12 * floor.abs().max(1.0);
    let mut violation = None;
    for w in grid.windows(2) {
        let (a, b) = (sigma(w[0]), sigma(w[1]));
        // A flat step is fine only once the curve has reached its floor
        // (up to rounding).
        if b > a || (b == a && a - floor > at_floor_tol) {
            violation = Some(w[1]);
            break;
        }
    }
    let at_horizon = sigma(horizon);
    let vanishing_ok = at_horizon < eps;
    Ok(AssumptionReport {
        decreasing_from: start,
        decreasing: ClauseResult { passed: violation.is_none(), first_violation: violation },
        sigma_at_horizon: at_horizon,
        limit_at_infinity: model.sigma_curve.limit_at_infinity(),
        vanishing: ClauseResult { passed: vanishing_ok, first_violation: (!vanishing_ok).then_some(horizon) },
    })
}

/// `n` equally spaced points covering `[lo, hi]`; a single point is the midpoint.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DoseCriteria {
    /// Smallest dose with `mean >= mean_min`, `sd <= sd_max`, `skewness >= skew_min`.
    Admissible { mean_min: f64, sd_max: f64, skew_min: f64 },
    /// Maximiser of `w_mean*mean~ - w_sd*sd~ + w_skew*skew~`, tildes being
    /// min-max normalisations over the grid.
    Scalarized { w_mean: f64, w_sd: f64, w_skew: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub dose: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoseRationale {
    pub grid_points: usize,
    pub sd_min: Extremum,
    pub sd_max: Extremum,
    pub mean_max: Extremum,
    pub skew_max: Extremum,
    /// Extremes of the observed standard deviations at design doses inside
    /// the interval, when observations were supplied.
    pub empirical_sd_min: Option<Extremum>,
    pub empirical_sd_max: Option<Extremum>,
    /// Observed row at the selected dose, when it is a design dose.
    pub empirical_at_dose: Option<SummaryRow>,
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalDose {
    pub dose: f64,
    pub report: DoseReport,
    pub rationale: DoseRationale,
}

pub fn optimal_dose(
    model: &DoseEffectModel,
    interval: (f64, f64),
    criteria: DoseCriteria,
    empirical: Option<&[SummaryRow]>,
) -> Result<OptimalDose> {
    let (lo, hi) = interval;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!("interval [{lo}, {hi}] is empty")));
    }
    check_dose(lo)?;
    let grid = uniform_grid(lo, hi, DOSE_GRID);
    let moments = grid.iter().map(|&d| model.moments_at(d)).collect::<Result<Vec<_>>>()?;
    let means: Vec<f64> = moments.iter().map(|m| m.mu).collect();
    let sds: Vec<f64> = moments.iter().map(|m| m.sigma).collect();
    let skews: Vec<f64> = moments.iter().map(|m| m.gamma).collect();

    let (index, score) = match criteria {
        DoseCriteria::Admissible { mean_min, sd_max, skew_min } => {
            let i = (0..grid.len())
                .find(|&i| means[i] >= mean_min && sds[i] <= sd_max && skews[i] >= skew_min)
                .ok_or(Error::NoAdmissibleDose { lo, hi })?;
            (i, None)
        }
        DoseCriteria::Scalarized { w_mean, w_sd, w_skew } => {
            let (i, s) = scalarized_argmax(&means, &sds, &skews, [w_mean, w_sd, w_skew]);
            (i, Some(s))
        }
    };
    let dose = grid[index];

    let extremum = |vals: &[f64], pick_max: bool| {
        let mut best = 0;
        for i in 1..vals.len() {
            if (pick_max && vals[i] > vals[best]) || (!pick_max && vals[i] < vals[best]) {
                best = i;
            }
        }
        Extremum { dose: grid[best], value: vals[best] }
    };
    let inside: Vec<&SummaryRow> = empirical.unwrap_or(&[]).iter().filter(|r| r.dose >= lo && r.dose <= hi).collect();
    let emp = |pick_max: bool| {
        inside.iter().map(|r| Extremum { dose: r.dose, value: r.sd_hat }).reduce(|a, b| {
            if (pick_max && b.value > a.value) || (!pick_max && b.value < a.value) {
                b
            } else {
                a
            }
        })
    };
    let rationale = DoseRationale {
        grid_points: grid.len(),
        sd_min: extremum(&sds, false),
        sd_max: extremum(&sds, true),
        mean_max: extremum(&means, true),
        skew_max: extremum(&skews, true),
        empirical_sd_min: emp(false),
        empirical_sd_max: emp(true),
        empirical_at_dose: inside.iter().find(|r| r.dose == dose).map(|r| (*r).clone()),
        score,
    };
    Ok(OptimalDose { dose, report: model.params_at(dose)?, rationale })
}

/// Index maximising the weighted sum of min-max normalised columns; ties go
/// to the smallest index. Returns the index and its score.
pub fn scalarized_argmax(means: &[f64], sds: &[f64], skews: &[f64], weights: [f64; 3]) -> (usize, f64) {
    let norm = |v: &[f64]| -> Vec<f64> {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        v.iter().map(|x| if span > 0.0 { (x - lo) / span } else { 0.0 }).collect()
    };
    let (m, s, g) = (norm(means), norm(sds), norm(skews));
    let [wm, ws, wg] = weights;
    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..m.len() {
        let score = wm * m[i] - ws * s[i] + wg * g[i];
        if score > best.1 {
            best = (i, score);
        }
    }
    best
}
