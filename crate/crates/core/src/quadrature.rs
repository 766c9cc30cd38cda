//! Adaptive Simpson quadrature.

const PANELS: usize = 16;
const MAX_DEPTH: u32 = 48;

/// Integrates `f` over `[a, b]` to an absolute tolerance `tol`.
///
/// The interval is first cut into a fixed number of panels so that narrow
/// features in a long interval are not skipped by the initial five-point
/// estimate. Reversed bounds give the negated integral.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if b < a {
        return -integrate(f, b, a, tol);
    }
    let h = (b - a) / PANELS as f64;
    let panel_tol = tol / PANELS as f64;
    (0..PANELS)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == PANELS { b } else { a + h * (i + 1) as f64 };
            let flo = f(lo);
            let fhi = f(hi);
            let mid = 0.5 * (lo + hi);
            let fmid = f(mid);
            let whole = simpson(lo, hi, flo, fmid, fhi);
            refine(&f, lo, hi, flo, fmid, fhi, whole, panel_tol, MAX_DEPTH)
        })
        .sum()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol || m <= a || m >= b {
        return left + right + diff / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
