//! Skew-normal dose-effect modelling.
//!
//! The effect of a drug at dose `d` is modelled as a skew-normal variable
//! whose mean follows a logistic curve in `d`, whose standard deviation
//! follows a Gaussian-type (or logistic) curve that vanishes at large doses,
//! and whose skewness follows a Gaussian-type curve. The crate covers the
//! whole chain: per-dose summaries of trial data, curve fitting, conversion
//! of moments to skew-normal parameters, simulation and dose selection.
//!
//! ```
//! use skewdose::fitting::{fit_logistic, FitOptions, Knowledge};
//!
//! let doses = [0.0, 0.75, 1.5, 3.0];
//! let means = [33.3875, 44.1625, 51.5, 78.225];
//! let fit = fit_logistic(&doses, &means, Knowledge::NoneKnown, &FitOptions::default()).unwrap();
//! assert!((fit.params.l1 - 21.8153).abs() < 1e-3);
//! ```

// `!(a < b)` is used on purpose so that NaN lands on the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod document;
pub mod dose_effect;
pub mod error;
pub mod fitting;
pub mod logistic;
pub mod pipeline;
pub mod quadrature;
pub mod skew_normal;
pub mod special;
pub mod trial_io;

pub use dose_effect::{DoseEffectModel, DoseReport, SigmaCurve};
pub use error::{Error, Result};
pub use fitting::{GaussianTypeParams, InflectionApprox};
pub use logistic::{InflectionData, LogisticParams};
pub use skew_normal::{MomentTriple, SkewNormalParams};
pub use trial_io::{DoseCohort, SummaryRow};
