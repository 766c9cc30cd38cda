//! Trial data in and out.
//!
//! Raw observations use a long `dose,value` CSV, one observation per row.
//! Per-dose summaries use `dose,n,mean,sd,skew` (the `n` column is optional
//! on input). Curves are written as `x,y` rows or as a static SVG polyline.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::skew_normal::estimate_moments;

#[derive(Debug, Clone, PartialEq)]
pub struct DoseCohort {
    pub dose: f64,
    pub observations: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub dose: f64,
    pub mean_hat: f64,
    pub sd_hat: f64,
    pub skew_hat: f64,
    /// Cohort size; 0 when a summary was read without one.
    pub n: usize,
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).flexible(true).from_reader(input)
}

fn parse_field(line: usize, field: Option<&str>, what: &str) -> Result<f64> {
    let raw = field.ok_or_else(|| Error::Parse { line, reason: format!("missing {what} field") })?;
    let v: f64 = raw.parse().map_err(|_| Error::Parse { line, reason: format!("{what} {raw:?} is not a number") })?;
    if !v.is_finite() {
        return Err(Error::Parse { line, reason: format!("{what} {raw:?} is not finite") });
    }
    Ok(v)
}

fn read_records<R: Read>(input: R) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut out = Vec::new();
    for rec in reader(input).into_records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::Parse { line, reason: e.to_string() }
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        out.push((line, rec));
    }
    Ok(out)
}

/// Reads raw observations and groups them by exact dose, ascending.
pub fn parse_csv<R: Read>(input: R) -> Result<Vec<DoseCohort>> {
    let records = read_records(input)?;
    let mut it = records.into_iter();
    let (hline, header) = it.next().ok_or(Error::EmptyInput)?;
    let cols: Vec<String> = header.iter().map(str::to_ascii_lowercase).collect();
    if cols != ["dose", "value"] {
        return Err(Error::Parse {
            line: hline,
            reason: format!("expected header `dose,value`, got {:?}", cols.join(",")),
        });
    }
    let mut groups: BTreeMap<u64, DoseCohort> = BTreeMap::new();
    for (line, rec) in it {
        if rec.len() != 2 {
            return Err(Error::Parse { line, reason: format!("expected 2 fields, got {}", rec.len()) });
        }
        let dose = parse_field(line, rec.get(0), "dose")?;
        let value = parse_field(line, rec.get(1), "value")?;
        if dose < 0.0 {
            return Err(Error::NegativeDose { line, dose });
        }
        // Nonnegative doses order like their bit patterns; -0.0 folds into 0.
        let dose = if dose == 0.0 { 0.0 } else { dose };
        groups
            .entry(dose.to_bits())
            .or_insert_with(|| DoseCohort { dose, observations: Vec::new() })
            .observations
            .push(value);
    }
    if groups.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(groups.into_values().collect())
}

/// Per-dose mean, standard deviation and skewness with `1/n` normalisation.
pub fn summarize(cohorts: &[DoseCohort]) -> Result<Vec<SummaryRow>> {
    cohorts
        .iter()
        .map(|c| {
            let m = estimate_moments(&c.observations).map_err(|e| Error::DegenerateCohort {
                dose: c.dose,
                reason: match e {
                    Error::DegenerateSample(r) => r,
                    other => other.to_string(),
                },
            })?;
            Ok(SummaryRow { dose: c.dose, mean_hat: m.mu, sd_hat: m.sigma, skew_hat: m.gamma, n: c.observations.len() })
        })
        .collect()
}

/// Reads a per-dose summary with columns `dose`, `mean`, `sd`, `skew`
/// (or `skewness`) and optionally `n`, in any order.
pub fn parse_summary_csv<R: Read>(input: R) -> Result<Vec<SummaryRow>> {
    let records = read_records(input)?;
    let mut it = records.into_iter();
    let (hline, header) = it.next().ok_or(Error::EmptyInput)?;
    let cols: Vec<String> = header.iter().map(str::to_ascii_lowercase).collect();
    let find = |names: &[&str]| cols.iter().position(|c| names.contains(&c.as_str()));
    let missing = |what: &str| Error::Parse { line: hline, reason: format!("summary header lacks a `{what}` column") };
    let i_dose = find(&["dose"]).ok_or_else(|| missing("dose"))?;
    let i_mean = find(&["mean"]).ok_or_else(|| missing("mean"))?;
    let i_sd = find(&["sd"]).ok_or_else(|| missing("sd"))?;
    let i_skew = find(&["skew", "skewness"]).ok_or_else(|| missing("skew"))?;
    let i_n = find(&["n"]);

    let mut rows = Vec::new();
    for (line, rec) in it {
        let dose = parse_field(line, rec.get(i_dose), "dose")?;
        if dose < 0.0 {
            return Err(Error::NegativeDose { line, dose });
        }
        let n = match i_n {
            Some(i) => {
                let raw = rec.get(i).unwrap_or("");
                raw.parse::<usize>().map_err(|_| Error::Parse { line, reason: format!("n {raw:?} is not a count") })?
            }
            None => 0,
        };
        let sd_hat = parse_field(line, rec.get(i_sd), "sd")?;
        if sd_hat < 0.0 {
            return Err(Error::Parse { line, reason: format!("negative standard deviation {sd_hat}") });
        }
        rows.push(SummaryRow {
            dose,
            mean_hat: parse_field(line, rec.get(i_mean), "mean")?,
            sd_hat,
            skew_hat: parse_field(line, rec.get(i_skew), "skew")?,
            n,
        });
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    rows.sort_by(|a, b| a.dose.total_cmp(&b.dose));
    if let Some(w) = rows.windows(2).find(|w| w[0].dose == w[1].dose) {
        return Err(Error::Parse { line: 0, reason: format!("dose {} appears twice", w[0].dose) });
    }
    Ok(rows)
}

/// `x` with `digits` significant digits in fixed notation.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{:.*}", digits.saturating_sub(1), x);
    }
    let mag = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding can carry into a new leading digit (9.999995 -> 10.00000).
    let rounded: f64 = s.parse().unwrap_or(x);
    if rounded != 0.0 && rounded.abs().log10().floor() as i64 > mag && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_exact(x: f64) -> String {
    format!("{x:?}")
}

pub fn emit_summary<W: Write>(rows: &[SummaryRow], mut out: W) -> Result<()> {
    writeln!(out, "dose,n,mean,sd,skew")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            format_exact(r.dose),
            r.n,
            format_sig(r.mean_hat, 6),
            format_sig(r.sd_hat, 6),
            format_sig(r.skew_hat, 6)
        )?;
    }
    Ok(())
}

/// Writes cohorts back in the long `dose,value` format with exact values.
pub fn emit_observations<W: Write>(cohorts: &[DoseCohort], mut out: W) -> Result<()> {
    writeln!(out, "dose,value")?;
    for c in cohorts {
        for v in &c.observations {
            writeln!(out, "{},{}", format_exact(c.dose), format_exact(*v))?;
        }
    }
    Ok(())
}

/// Samples `curve` at `steps` uniform points of `[lo, hi]` (the midpoint when
/// `steps == 1`).
pub fn curve_points<F: Fn(f64) -> f64>(curve: F, lo: f64, hi: f64, steps: usize) -> Vec<(f64, f64)> {
    crate::dose_effect::uniform_grid(lo, hi, steps).into_iter().map(|x| (x, curve(x))).collect()
}

pub fn emit_curve_points<W: Write>(points: &[(f64, f64)], mut out: W) -> Result<()> {
    writeln!(out, "x,y")?;
    for (x, y) in points {
        writeln!(out, "{},{}", format_exact(*x), format_exact(*y))?;
    }
    Ok(())
}

const SVG_W: f64 = 800.0;
const SVG_H: f64 = 500.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const TICKS: usize = 5;

/// Renders a curve as an SVG 1.1 polyline on linear axes with tick labels.
pub fn render_svg(points: &[(f64, f64)], title: &str, x_label: &str, y_label: &str) -> String {
    let (mut xmin, mut xmax, mut ymin, mut ymax) = bounds(points);
    if xmax <= xmin {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if ymax <= ymin {
        let pad = if ymin == 0.0 { 0.5 } else { 0.05 * ymin.abs() };
        ymin -= pad;
        ymax += pad;
    }
    let pw = SVG_W - MARGIN_L - MARGIN_R;
    let ph = SVG_H - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - xmin) / (xmax - xmin) * pw;
    let sy = |y: f64| MARGIN_T + (ymax - y) / (ymax - ymin) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SVG_W}" height="{SVG_H}" viewBox="0 0 {SVG_W} {SVG_H}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{SVG_W}" height="{SVG_H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        SVG_W / 2.0,
        escape(title)
    );
    let x0 = MARGIN_L;
    let y0 = MARGIN_T + ph;
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{}" y2="{y0}" stroke="black"/>"#, x0 + pw);
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{MARGIN_T}" x2="{x0}" y2="{y0}" stroke="black"/>"#);
    for i in 0..=TICKS {
        let t = i as f64 / TICKS as f64;
        let xv = xmin + t * (xmax - xmin);
        let px = sx(xv);
        let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{px:.2}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
            y0 + 20.0,
            format_sig(xv, 4)
        );
        let yv = ymin + t * (ymax - ymin);
        let py = sy(yv);
        let _ = writeln!(s, r#"<line x1="{}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="12">{}</text>"#,
            x0 - 8.0,
            py + 4.0,
            format_sig(yv, 4)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
        x0 + pw / 2.0,
        SVG_H - 10.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{0}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 16 {0})">{1}</text>"#,
        MARGIN_T + ph / 2.0,
        escape(y_label)
    );
    let pts: Vec<String> = points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
    let _ = writeln!(s, r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#, pts.join(" "));
    s.push_str("</svg>\n");
    s
}

fn bounds(points: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    let finite = points.iter().filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut a, mut b, mut c, mut d) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in finite {
        a = a.min(x);
        b = b.max(x);
        c = c.min(y);
        d = d.max(y);
    }
    if a > b {
        (0.0, 1.0, 0.0, 1.0)
    } else {
        (a, b, c, d)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
