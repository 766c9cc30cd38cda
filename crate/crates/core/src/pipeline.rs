//! End-to-end fit of a [`DoseEffectModel`] from per-dose summaries.
//!
//! Means go through the logistic fit, the observed standard deviations are
//! classified and fitted with either a Gaussian-type curve (offset 0) or a
//! logistic curve with lower asymptote 0, and the observed skewness is fitted
//! with a Gaussian-type curve under the chosen offset mode.

use crate::dose_effect::{
    classify_sigma_shape, DoseEffectModel, SigmaClassification, SigmaCurve, SigmaShape, DEFAULT_CONSTANT_TOL,
};
use crate::error::{Error, Result};
use crate::fitting::{
    fit_gaussian_type, fit_logistic, FitOptions, GaussianFit, Knowledge, LogisticFit, OffsetMode, DEFAULT_GRID_STEPS,
};
use crate::trial_io::SummaryRow;

/// How the skewness curve offset is chosen by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SkewOffset {
    Zero,
    /// Grid over `[min - 2 (max - min), min)` of the observed skewness.
    Grid {
        steps: usize,
    },
    Custom(OffsetMode),
}

impl Default for SkewOffset {
    fn default() -> Self {
        SkewOffset::Grid { steps: DEFAULT_GRID_STEPS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions {
    pub knowledge: Knowledge,
    pub fit: FitOptions,
    pub skew_offset: SkewOffset,
    pub constant_tol: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            knowledge: Knowledge::NoneKnown,
            fit: FitOptions::default(),
            skew_offset: SkewOffset::default(),
            constant_tol: DEFAULT_CONSTANT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SigmaFit {
    Gaussian(GaussianFit),
    Logistic(LogisticFit),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub model: DoseEffectModel,
    pub mean_fit: LogisticFit,
    pub sigma_shape: SigmaClassification,
    pub sigma_fit: SigmaFit,
    pub skew_fit: GaussianFit,
    pub skew_offset_mode: OffsetMode,
}

impl FittedModel {
    /// `(key, value)` pairs describing how the model was obtained.
    pub fn info(&self) -> Vec<(String, String)> {
        let r = &self.mean_fit.report;
        let a = &r.inflection;
        let mut v = vec![
            ("regime".to_string(), format!("{:?}", r.regime)),
            ("theta_n".into(), format!("{:?}", a.theta_n)),
            ("gamma_n".into(), format!("{:?}", a.gamma_n)),
            ("delta_n".into(), format!("{:?}", a.delta_n)),
            ("mean_sse".into(), format!("{:?}", r.sse)),
            ("sigma_shape".into(), self.sigma_shape.shape.to_string()),
            ("skew_offset_mode".into(), format!("{:?}", self.skew_offset_mode)),
            ("skew_sse".into(), format!("{:?}", self.skew_fit.sse)),
        ];
        if let Some(e) = r.l1_equation_residual {
            v.push(("l1_equation_residual".into(), format!("{e:?}")));
        }
        v
    }
}

pub fn fit_model(rows: &[SummaryRow], opts: &PipelineOptions) -> Result<FittedModel> {
    let doses: Vec<f64> = rows.iter().map(|r| r.dose).collect();
    let means: Vec<f64> = rows.iter().map(|r| r.mean_hat).collect();
    let sds: Vec<f64> = rows.iter().map(|r| r.sd_hat).collect();
    let skews: Vec<f64> = rows.iter().map(|r| r.skew_hat).collect();

    let mean_fit = fit_logistic(&doses, &means, opts.knowledge, &opts.fit)?;

    let sigma_shape = classify_sigma_shape(&doses, &sds, opts.constant_tol)?;
    let (sigma_curve, sigma_fit) = match sigma_shape.shape {
        SigmaShape::IncreasingThenDecreasing => {
            let g = fit_gaussian_type(&doses, &sds, OffsetMode::Fixed(0.0))?;
            (SigmaCurve::GaussianType(g.params), SigmaFit::Gaussian(g))
        }
        SigmaShape::ConstantThenDecreasing => {
            let f = fit_logistic(&doses, &sds, Knowledge::L1Known { l1: 0.0 }, &opts.fit)?;
            if f.params.is_increasing() {
                return Err(Error::Domain(
                    "logistic dispersion fit is increasing; it cannot vanish at large doses".into(),
                ));
            }
            (SigmaCurve::Logistic(f.params), SigmaFit::Logistic(f))
        }
    };

    let offset_mode = match opts.skew_offset {
        SkewOffset::Zero => OffsetMode::Fixed(0.0),
        SkewOffset::Grid { steps } => {
            let lo = skews.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = skews.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let range = (hi - lo).max(lo.abs()).max(1e-3);
            OffsetMode::GridSearch { lo: lo - 2.0 * range, hi: lo, steps }
        }
        SkewOffset::Custom(m) => m,
    };
    let skew_fit = fit_gaussian_type(&doses, &skews, offset_mode)?;

    let model = DoseEffectModel::new(mean_fit.params, sigma_curve, skew_fit.params, sigma_shape.d0_hat)?;
    Ok(FittedModel { model, mean_fit, sigma_shape, sigma_fit, skew_fit, skew_offset_mode: offset_mode })
}
