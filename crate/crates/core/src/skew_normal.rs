//! The skew-normal law `SN(xi, omega^2, alpha)`.
//!
//! Density `(1/(omega*sqrt(2*pi))) * exp(-(x-xi)^2/(2*omega^2)) * (1 + erf(alpha*(x-xi)/(omega*sqrt(2))))`,
//! the closed-form map from `(xi, omega, alpha)` to mean, standard deviation
//! and Pearson skewness, its inverse, sample estimators with `1/n`
//! normalisation, and a seeded sampler.

use std::f64::consts::{PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{ensure_finite, Error, Result};
use crate::quadrature;
use crate::special::{erfc, sqrt_2_over_pi, FRAC_1_SQRT_2PI};

/// Supremum of `|gamma|` over the skew-normal family,
/// `((4-pi)/2) * (2/pi)^{3/2} / (1-2/pi)^{3/2}`.
pub const GAMMA_MAX: f64 = 0.995_271_746_431_156_2;

/// Magnitude that out-of-range skewness values are clamped to.
pub const SKEWNESS_CLAMP: f64 = 0.995;

const CDF_ABS_TOL: f64 = 1e-10;
/// Half-width, in units of omega, outside which the density is treated as
/// carrying no mass. `2*Phi(-14)` is below 1e-43.
const CDF_SUPPORT: f64 = 14.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewNormalParams {
    pub xi: f64,
    pub omega: f64,
    pub alpha: f64,
}

/// Mean, standard deviation and Pearson skewness.
///
/// Construction only checks `sigma > 0` and finiteness: sample skewness is
/// unbounded, so the skew-normal feasibility bound is enforced where moments
/// are inverted ([`params_of_moments`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentTriple {
    pub mu: f64,
    pub sigma: f64,
    pub gamma: f64,
}

/// What to do with a skewness the family cannot represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SkewnessPolicy {
    /// Clamp `|gamma| >= 0.995` to `+-0.995` and flag the result.
    #[default]
    Clamp,
    /// Fail with [`Error::InfeasibleSkewness`] when `|gamma| >= GAMMA_MAX`.
    Reject,
}

/// Result of inverting a [`MomentTriple`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentInversion {
    pub params: SkewNormalParams,
    /// True when the input skewness was clamped before inversion.
    pub clamped: bool,
}

impl SkewNormalParams {
    pub fn new(xi: f64, omega: f64, alpha: f64) -> Result<Self> {
        ensure_finite("xi", xi)?;
        ensure_finite("omega", omega)?;
        ensure_finite("alpha", alpha)?;
        if omega <= 0.0 {
            return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
        }
        Ok(Self { xi, omega, alpha })
    }

    /// `alpha / sqrt(1 + alpha^2)`.
    pub fn delta(&self) -> f64 {
        delta_of_alpha(self.alpha)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        sn_pdf(self, x)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        sn_cdf(self, x)
    }

    pub fn moments(&self) -> MomentTriple {
        moments_of_params(self)
    }

    pub fn sample(&self, seed: u64, n: usize) -> Vec<f64> {
        sn_sample(self, seed, n)
    }
}

impl MomentTriple {
    pub fn new(mu: f64, sigma: f64, gamma: f64) -> Result<Self> {
        ensure_finite("mu", mu)?;
        ensure_finite("sigma", sigma)?;
        ensure_finite("gamma", gamma)?;
        if sigma <= 0.0 {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { mu, sigma, gamma })
    }
}

fn delta_of_alpha(alpha: f64) -> f64 {
    if alpha.is_infinite() {
        return alpha.signum();
    }
    alpha / (1.0 + alpha * alpha).sqrt()
}

pub fn sn_pdf(params: &SkewNormalParams, x: f64) -> f64 {
    let z = (x - params.xi) / params.omega;
    // 1 + erf(t) == erfc(-t), which stays accurate when t is very negative.
    let bracket = erfc(-params.alpha * z / SQRT_2);
    FRAC_1_SQRT_2PI / params.omega * (-0.5 * z * z).exp() * bracket
}

/// Distribution function by adaptive quadrature of [`sn_pdf`].
///
/// Left of the location the mass below `x` is integrated directly; right of
/// it the upper tail is integrated and subtracted, so both tails keep
/// absolute accuracy near 1e-10.
pub fn sn_cdf(params: &SkewNormalParams, x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let lo = params.xi - CDF_SUPPORT * params.omega;
    let hi = params.xi + CDF_SUPPORT * params.omega;
    if x <= lo {
        return 0.0;
    }
    if x >= hi {
        return 1.0;
    }
    let pdf = |t: f64| sn_pdf(params, t);
    let v = if x <= params.xi {
        quadrature::integrate(pdf, lo, x, CDF_ABS_TOL)
    } else {
        1.0 - quadrature::integrate(pdf, x, hi, CDF_ABS_TOL)
    };
    v.clamp(0.0, 1.0)
}

pub fn moments_of_params(params: &SkewNormalParams) -> MomentTriple {
    let b = params.delta() * sqrt_2_over_pi();
    let var_factor = 1.0 - b * b;
    MomentTriple {
        mu: params.xi + params.omega * b,
        sigma: params.omega * var_factor.sqrt(),
        gamma: 0.5 * (4.0 - PI) * b.powi(3) / var_factor.powf(1.5),
    }
}

/// `|delta|` from `|gamma|`, signed like `gamma`.
fn delta_of_gamma(gamma: f64) -> f64 {
    let g = gamma.abs();
    if g == 0.0 {
        return 0.0;
    }
    let g23 = g.powf(2.0 / 3.0);
    let k = (0.5 * (4.0 - PI)).powf(2.0 / 3.0);
    let d = g.cbrt() * (0.5 * PI).sqrt() / (g23 + k).sqrt();
    d.copysign(gamma)
}

/// Inverts the moment relations of the family.
pub fn params_of_moments(moments: &MomentTriple, policy: SkewnessPolicy) -> Result<MomentInversion> {
    let m = MomentTriple::new(moments.mu, moments.sigma, moments.gamma)?;
    let (gamma, clamped) = match policy {
        SkewnessPolicy::Clamp if m.gamma.abs() >= SKEWNESS_CLAMP => (SKEWNESS_CLAMP.copysign(m.gamma), true),
        SkewnessPolicy::Reject if m.gamma.abs() >= GAMMA_MAX => {
            return Err(Error::InfeasibleSkewness { gamma: m.gamma, bound: GAMMA_MAX });
        }
        _ => (m.gamma, false),
    };
    let delta = delta_of_gamma(gamma);
    let alpha = delta / (1.0 - delta * delta).sqrt();
    let omega = m.sigma / (1.0 - 2.0 * delta * delta / PI).sqrt();
    let xi = m.mu - omega * delta * sqrt_2_over_pi();
    Ok(MomentInversion { params: SkewNormalParams::new(xi, omega, alpha)?, clamped })
}

/// Sample mean, standard deviation and skewness with `1/n` normalisation.
pub fn estimate_moments(sample: &[f64]) -> Result<MomentTriple> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::DegenerateSample(format!("need at least 2 observations, got {n}")));
    }
    if let Some(bad) = sample.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite observation {bad}")));
    }
    if sample.iter().all(|&x| x == sample[0]) {
        return Err(Error::DegenerateSample("all observations are equal".into()));
    }
    let nf = n as f64;
    let mean = sample.iter().sum::<f64>() / nf;
    let var = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / nf;
    let sd = var.sqrt();
    if sd == 0.0 {
        return Err(Error::DegenerateSample("zero variance".into()));
    }
    let skew = sample.iter().map(|x| ((x - mean) / sd).powi(3)).sum::<f64>() / nf;
    MomentTriple::new(mean, sd, skew)
}

/// Method-of-moments estimate of `(xi, omega, alpha)`.
pub fn estimate_params(sample: &[f64], policy: SkewnessPolicy) -> Result<MomentInversion> {
    params_of_moments(&estimate_moments(sample)?, policy)
}

/// Draws `n` values using `xi + omega*(delta*|Z0| + sqrt(1-delta^2)*Z1)`.
pub fn sn_sample(params: &SkewNormalParams, seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sn_sample_with(params, &mut rng, n)
}

pub fn sn_sample_with<R: Rng + ?Sized>(params: &SkewNormalParams, rng: &mut R, n: usize) -> Vec<f64> {
    let delta = params.delta();
    let ortho = (1.0 - delta * delta).sqrt();
    (0..n)
        .map(|_| {
            let z0: f64 = rng.sample(StandardNormal);
            let z1: f64 = rng.sample(StandardNormal);
            params.xi + params.omega * (delta * z0.abs() + ortho * z1)
        })
        .collect()
}

const _: () = assert!(SKEWNESS_CLAMP < GAMMA_MAX);
