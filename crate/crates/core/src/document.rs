//! Flat `key=value` text form of a [`DoseEffectModel`].
//!
//! One key per line, `#` starts a comment line, numbers are written in the
//! shortest form that parses back to the identical `f64`. Keys under `fit.`
//! are informational and ignored when loading.
//!
//! ```text
//! mu.m=-0.8277729483619028
//! mu.p=-2.592955955263998
//! mu.l1=21.815268988345323
//! mu.l2=107.90973101165468
//! sigma.family=gaussian
//! sigma.l=0.0
//! sigma.m=0.15018372
//! ...
//! ```

use std::collections::BTreeMap;

use crate::dose_effect::{DoseEffectModel, SigmaCurve};
use crate::error::{Error, Result};
use crate::fitting::GaussianTypeParams;
use crate::logistic::LogisticParams;
use crate::trial_io::format_exact;

pub const INFO_PREFIX: &str = "fit.";

pub fn to_document(model: &DoseEffectModel, info: &[(String, String)]) -> String {
    let mut lines = vec!["# skewdose dose-effect model".to_string()];
    let mut put = |k: &str, v: f64| lines.push(format!("{k}={}", format_exact(v)));
    let mu = &model.mu_curve;
    put("mu.m", mu.m);
    put("mu.p", mu.p);
    put("mu.l1", mu.l1);
    put("mu.l2", mu.l2);
    match &model.sigma_curve {
        SigmaCurve::GaussianType(g) => {
            lines.push("sigma.family=gaussian".into());
            let mut put = |k: &str, v: f64| lines.push(format!("{k}={}", format_exact(v)));
            put("sigma.l", g.l);
            put("sigma.m", g.m);
            put("sigma.p", g.p);
            put("sigma.q", g.q);
        }
        SigmaCurve::Logistic(p) => {
            lines.push("sigma.family=logistic".into());
            let mut put = |k: &str, v: f64| lines.push(format!("{k}={}", format_exact(v)));
            put("sigma.m", p.m);
            put("sigma.p", p.p);
            put("sigma.l1", p.l1);
            put("sigma.l2", p.l2);
        }
    }
    let g = &model.gamma_curve;
    for (k, v) in [("gamma.l", g.l), ("gamma.m", g.m), ("gamma.p", g.p), ("gamma.q", g.q), ("d0_hat", model.d0_hat)] {
        lines.push(format!("{k}={}", format_exact(v)));
    }
    for (k, v) in info {
        lines.push(format!("{INFO_PREFIX}{k}={v}"));
    }
    let mut s = lines.join("\n");
    s.push('\n');
    s
}

pub fn from_document(text: &str) -> Result<DoseEffectModel> {
    let mut keys: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Document { line: i + 1, reason: format!("expected key=value, got {line:?}") })?;
        let (k, v) = (k.trim(), v.trim());
        if k.starts_with(INFO_PREFIX) {
            continue;
        }
        if keys.insert(k, (i + 1, v)).is_some() {
            return Err(Error::Document { line: i + 1, reason: format!("duplicate key {k}") });
        }
    }
    let mut doc = Doc { keys };
    let mu = LogisticParams::new(doc.num("mu.m")?, doc.num("mu.p")?, doc.num("mu.l1")?, doc.num("mu.l2")?)?;
    let sigma = match doc.text("sigma.family")? {
        "gaussian" => {
            let l = doc.num("sigma.l")?;
            SigmaCurve::GaussianType(GaussianTypeParams::new(
                l,
                doc.num("sigma.m")?,
                doc.num("sigma.p")?,
                doc.num("sigma.q")?,
            )?)
        }
        "logistic" => SigmaCurve::Logistic(LogisticParams::new(
            doc.num("sigma.m")?,
            doc.num("sigma.p")?,
            doc.num("sigma.l1")?,
            doc.num("sigma.l2")?,
        )?),
        other => {
            return Err(Error::Document {
                line: doc.line_of("sigma.family"),
                reason: format!("unknown sigma family {other:?}"),
            })
        }
    };
    let gamma =
        GaussianTypeParams::new(doc.num("gamma.l")?, doc.num("gamma.m")?, doc.num("gamma.p")?, doc.num("gamma.q")?)?;
    let d0 = doc.num("d0_hat")?;
    if let Some((k, (line, _))) = doc.keys.iter().next() {
        return Err(Error::Document { line: *line, reason: format!("unknown key {k}") });
    }
    DoseEffectModel::new(mu, sigma, gamma, d0)
}

struct Doc<'a> {
    keys: BTreeMap<&'a str, (usize, &'a str)>,
}

impl<'a> Doc<'a> {
    fn line_of(&self, key: &str) -> usize {
        self.keys.get(key).map_or(0, |(l, _)| *l)
    }

    fn text(&mut self, key: &str) -> Result<&'a str> {
        self.keys
            .remove(key)
            .map(|(_, v)| v)
            .ok_or_else(|| Error::Document { line: 0, reason: format!("missing key {key}") })
    }

    fn num(&mut self, key: &str) -> Result<f64> {
        let line = self.line_of(key);
        let raw = self.text(key)?;
        let v: f64 = raw
            .parse()
            .map_err(|_| Error::Document { line, reason: format!("{key} value {raw:?} is not a number") })?;
        if !v.is_finite() {
            return Err(Error::Document { line, reason: format!("{key} is not finite") });
        }
        Ok(v)
    }
}
