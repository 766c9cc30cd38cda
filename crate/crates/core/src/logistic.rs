//! Four-parameter logistic curves `f(x) = l1 + 1/((l2 - l1)^-1 + exp(m*x + p))`.
//!
//! `m < 0` gives an increasing curve from `l1` to `l2`, `m > 0` a decreasing
//! one. The inflection point, the identities that rebuild the parameters from
//! `(l1, f(0), theta, f(theta), f'(theta))`, and the residual of the
//! integral form of the logistic differential equation all live here.

use crate::error::{ensure_finite, Error, Result};
use crate::quadrature;

const ODE_QUAD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticParams {
    pub m: f64,
    pub p: f64,
    pub l1: f64,
    pub l2: f64,
}

/// Abscissa, ordinate and slope at the inflection point.
///
/// Also used to carry approximations of these three values, which is how
/// the fitting code feeds secant estimates through the exact identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InflectionData {
    pub theta: f64,
    pub f_theta: f64,
    pub f_prime_theta: f64,
}

impl LogisticParams {
    pub fn new(m: f64, p: f64, l1: f64, l2: f64) -> Result<Self> {
        ensure_finite("m", m)?;
        ensure_finite("p", p)?;
        ensure_finite("l1", l1)?;
        ensure_finite("l2", l2)?;
        if m == 0.0 {
            return Err(Error::InvalidParameter("m must be nonzero".into()));
        }
        if l2 <= l1 {
            return Err(Error::InvalidParameter(format!("need l2 > l1, got l1={l1}, l2={l2}")));
        }
        Ok(Self { m, p, l1, l2 })
    }

    pub fn span(&self) -> f64 {
        self.l2 - self.l1
    }

    pub fn eval(&self, x: f64) -> f64 {
        let c = 1.0 / self.span();
        let w = self.m * x + self.p;
        if w > 0.0 {
            // exp(w) may overflow; divide through by it.
            let r = (-w).exp();
            self.l1 + r / (c * r + 1.0)
        } else {
            self.l1 + 1.0 / (c + w.exp())
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let c = 1.0 / self.span();
        let w = self.m * x + self.p;
        if w > 0.0 {
            let r = (-w).exp();
            -self.m * r / (c * r + 1.0).powi(2)
        } else {
            let e = w.exp();
            -self.m * e / (c + e).powi(2)
        }
    }

    pub fn inflection(&self) -> InflectionData {
        InflectionData {
            theta: -(self.span().ln() + self.p) / self.m,
            f_theta: 0.5 * (self.l1 + self.l2),
            f_prime_theta: -self.m * self.span() / 4.0,
        }
    }

    /// `(lim at -inf, lim at +inf)`.
    pub fn limits(&self) -> (f64, f64) {
        if self.m < 0.0 {
            (self.l1, self.l2)
        } else {
            (self.l2, self.l1)
        }
    }

    pub fn is_increasing(&self) -> bool {
        self.m < 0.0
    }
}

/// Rebuilds the parameters from `l1`, `f(0)` and the inflection ordinate and slope.
///
/// `l2 = 2 f(theta) - l1`, `m = -2 f'(theta) / (f(theta) - l1)` and
/// `p = log(1/(f(0) - l1) - 1/(2 (f(theta) - l1)))`. The abscissa `theta`
/// is not needed; it enters only through the equation that pins `l1`.
pub fn params_from_inflection(l1: f64, f0: f64, inf: &InflectionData) -> Result<LogisticParams> {
    if !(f0 > l1) {
        return Err(Error::Domain(format!("f(0) = {f0} must exceed l1 = {l1}")));
    }
    let half_span = inf.f_theta - l1;
    if !(half_span > 0.0) {
        return Err(Error::Domain(format!("f(theta) = {} must exceed l1 = {l1}", inf.f_theta)));
    }
    let arg = 1.0 / (f0 - l1) - 1.0 / (2.0 * half_span);
    if !(arg > 0.0) {
        return Err(Error::Domain(format!(
            "log argument {arg} is not positive (f(0) = {f0} is not below 2 f(theta) - l1 = {})",
            2.0 * inf.f_theta - l1
        )));
    }
    LogisticParams::new(-2.0 * inf.f_prime_theta / half_span, arg.ln(), l1, 2.0 * inf.f_theta - l1)
}

/// Left side of the equation satisfied by the true lower asymptote:
/// `log(2 (f(theta) - f(0)) / (f(0) - l1) + 1) - 2 theta f'(theta) / (f(theta) - l1)`.
pub fn l1_residual(l1_candidate: f64, f0: f64, inf: &InflectionData) -> Result<f64> {
    if !(f0 > l1_candidate) {
        return Err(Error::Domain(format!("f(0) = {f0} must exceed the candidate l1 = {l1_candidate}")));
    }
    let arg = 2.0 * (inf.f_theta - f0) / (f0 - l1_candidate) + 1.0;
    if !(arg > 0.0) {
        return Err(Error::Domain(format!("log argument {arg} is not positive")));
    }
    Ok(arg.ln() - 2.0 * inf.theta * inf.f_prime_theta / (inf.f_theta - l1_candidate))
}

/// `|f(x) - (f(0) - m * integral_0^x (f - l1)(1 - (f - l1)/(l2 - l1)) du)|`.
pub fn ode_residual(params: &LogisticParams, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let span = params.span();
    let integrand = |u: f64| {
        let y = params.eval(u) - params.l1;
        y * (1.0 - y / span)
    };
    let integral = quadrature::integrate(integrand, 0.0, x, ODE_QUAD_TOL);
    (params.eval(x) - (params.eval(0.0) - params.m * integral)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn escape_time() -> LogisticParams {
        let l1 = 21.8153;
        LogisticParams::new(-0.8278, -2.5929, l1, l1 + 1.0 / 0.0116).unwrap()
    }

    fn unit() -> LogisticParams {
        LogisticParams::new(-1.0, 0.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn validation() {
        assert!(LogisticParams::new(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(LogisticParams::new(1.0, 0.0, 1.0, 1.0).is_err());
        assert!(LogisticParams::new(1.0, f64::INFINITY, 0.0, 1.0).is_err());
    }

    #[test]
    fn eval_escape_time_curve() {
        let f = escape_time();
        assert!((f.eval(0.0) - 33.39).abs() < 0.01);
        assert!((f.eval(3.0) - 77.9).abs() < 0.05, "{}", f.eval(3.0));
    }

    #[test]
    fn eval_saturates_to_asymptotes() {
        let f = escape_time();
        assert_eq!(f.eval(-1e6), f.l1);
        assert!((f.eval(1e6) - f.l2).abs() <= 1e-12 * f.l2);
        assert!(f.derivative(-1e6).is_finite());
        assert!(f.derivative(1e6).is_finite());
        for x in [-50.0, -5.0, 0.0, 5.0, 50.0] {
            let y = f.eval(x / 0.8278);
            assert!(y >= f.l1 && y <= f.l2);
        }
    }

    #[test]
    fn limits_follow_slope_sign() {
        let f = escape_time();
        assert_eq!(f.limits(), (f.l1, f.l2));
        let g = LogisticParams::new(1.0, 0.3, -2.0, 4.0).unwrap();
        assert_eq!(g.limits(), (4.0, -2.0));
        for h in [f, g] {
            let (lo, hi) = h.limits();
            assert!((h.eval(-50.0 / h.m.abs()) - lo).abs() < 1e-6);
            assert!((h.eval(50.0 / h.m.abs()) - hi).abs() < 1e-6);
        }
    }

    #[test]
    fn derivative_sign_and_finite_difference() {
        let f = escape_time();
        let h = 1e-5;
        for i in 0..40 {
            let x = -10.0 + 0.5 * i as f64;
            let d = f.derivative(x);
            assert!(d > 0.0);
            let fd = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
            assert!((fd - d).abs() < 1e-6, "x={x}: {fd} vs {d}");
        }
        let g = LogisticParams::new(2.0, 1.0, 0.0, 3.0).unwrap();
        assert!(g.derivative(0.3) < 0.0);
    }

    #[test]
    fn inflection_examples() {
        let inf = escape_time().inflection();
        // The four-decimal printed coefficients move theta to about 2.2516.
        assert!((inf.theta - 2.2502).abs() < 2e-3, "{}", inf.theta);
        let u = unit().inflection();
        assert_eq!(u.theta, 0.0);
        assert_eq!(u.f_theta, 0.5);
        let f = escape_time();
        assert!((f.eval(inf.theta) - inf.f_theta).abs() < 1e-12 * inf.f_theta);
        assert_relative_eq!(f.derivative(inf.theta), inf.f_prime_theta, max_relative = 1e-12);
    }

    #[test]
    fn curvature_changes_sign_at_inflection() {
        let f = escape_time();
        let theta = f.inflection().theta;
        let h = 1e-3;
        let second = |x: f64| (f.eval(x + h) - 2.0 * f.eval(x) + f.eval(x - h)) / (h * h);
        assert!(second(theta - 0.2) > 0.0);
        assert!(second(theta + 0.2) < 0.0);
    }

    #[test]
    fn rebuild_from_escape_time_inflection() {
        let inf = InflectionData { theta: 2.25, f_theta: 64.8625, f_prime_theta: 26.725 / 1.5 };
        let f = params_from_inflection(21.8153, 33.3875, &inf).unwrap();
        assert!((f.m + 0.8278).abs() < 1e-3, "{}", f.m);
        assert!((f.p + 2.5929).abs() < 1e-3, "{}", f.p);
        assert!((f.l2 - 107.9097).abs() < 1e-9);
    }

    #[test]
    fn rebuild_round_trip() {
        for f in [escape_time(), unit(), LogisticParams::new(1.3, -0.4, -5.0, 2.0).unwrap()] {
            let g = params_from_inflection(f.l1, f.eval(0.0), &f.inflection()).unwrap();
            assert_relative_eq!(g.m, f.m, max_relative = 1e-12);
            assert!((g.p - f.p).abs() <= 1e-12 * f.p.abs().max(1.0));
            assert_relative_eq!(g.l2, f.l2, max_relative = 1e-12);
        }
    }

    #[test]
    fn rebuild_rejects_inconsistent_geometry() {
        let inf = InflectionData { theta: 2.25, f_theta: 64.8625, f_prime_theta: 17.8 };
        let l1 = 21.8153;
        let f0 = 2.0 * inf.f_theta - l1 + 0.1;
        assert!(matches!(params_from_inflection(l1, f0, &inf), Err(Error::Domain(_))));
        assert!(matches!(params_from_inflection(40.0, 33.0, &inf), Err(Error::Domain(_))));
    }

    #[test]
    fn l1_residual_zero_at_truth() {
        for f in [escape_time(), unit(), LogisticParams::new(-0.3, 1.0, 2.0, 9.0).unwrap()] {
            let r = l1_residual(f.l1, f.eval(0.0), &f.inflection()).unwrap();
            assert!(r.abs() < 1e-12, "{r}");
        }
    }

    #[test]
    fn l1_residual_on_escape_time_table() {
        let inf = InflectionData { theta: 2.25, f_theta: 64.8625, f_prime_theta: 26.725 / 1.5 };
        let r = l1_residual(21.8153, 33.3875, &inf).unwrap();
        assert!(r.abs() < 1e-3, "{r}");
        assert!(l1_residual(33.3875, 33.3875, &inf).is_err());
    }

    #[test]
    fn l1_residual_continuous_near_admissible_edge() {
        let f = escape_time();
        let inf = f.inflection();
        let f0 = f.eval(0.0);
        let mut prev = l1_residual(f0 - 1e-3, f0, &inf).unwrap();
        for k in 1..200 {
            let l = f0 - 1e-3 - 1e-6 * k as f64;
            let r = l1_residual(l, f0, &inf).unwrap();
            assert!((r - prev).abs() < 1e-2);
            prev = r;
        }
    }

    #[test]
    fn ode_residual_examples() {
        assert_eq!(ode_residual(&escape_time(), 0.0), 0.0);
        assert!(ode_residual(&unit(), 5.0) <= 1e-8);
        assert!(ode_residual(&unit(), -5.0) <= 1e-8);
        for x in [-3.0, 1.0, 2.25, 4.0] {
            assert!(ode_residual(&escape_time(), x) <= 1e-6);
        }
    }
}
