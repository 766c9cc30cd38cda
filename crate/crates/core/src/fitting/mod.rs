//! Parameter recovery for logistic and Gaussian-type curves.
//!
//! Logistic curves are fitted under three regimes for the asymptotes:
//! both known (log-reciprocal linearisation plus linear regression), only the
//! lower one known (upper one from the steepest secant), or neither (lower
//! asymptote as the root of a one-dimensional equation built from the
//! steepest secant). Gaussian-type curves `l + exp(-m d^2 + p d + q)` are
//! fitted by quadratic least squares on `log(v - l)`.

mod gaussian;
mod logistic_fit;
mod regression;

pub use gaussian::{fit_gaussian_type, GaussianFit, GaussianTypeParams, OffsetMode, DEFAULT_GRID_STEPS};
pub use logistic_fit::{
    detect_inflection, fit_known_limits, fit_logistic, l1_equation_residual, phi_transform, solve_l1, FitOptions,
    InflectionApprox, Knowledge, LogisticFit, LogisticFitReport, Regime, L1_SCAN_POINTS,
};
pub use regression::{linreg, polyfit_quadratic, LinRegResult, QuadraticFit, RegressionMode};
