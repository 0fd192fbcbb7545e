//! Adaptive quadrature used for truncated moments and convergence checks.
//!
//! The integrands here are piecewise-smooth power laws (tails, densities) or
//! spiky but integrable oscillators, so classic adaptive Simpson with a depth
//! cap is accurate and cheap.  Wide ranges are split into geometric panels
//! first; each panel is then refined adaptively.

/// Adaptive Simpson on `[a, b]` with mixed absolute/relative tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[inline]
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
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
    let delta = left + right - whole;
    // the rounding floor keeps tolerance halving from chasing noise once
    // delta reaches ulp scale of the panel value
    let floor = 4.0 * f64::EPSILON * (left.abs() + right.abs());
    if depth == 0 || delta.abs() <= (15.0 * tol).max(floor) {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integrate over `[a, b]` (0 < a < b) by geometric panels of the given
/// ratio, refining each panel adaptively.  Tolerance is apportioned per
/// panel relative to a coarse first-pass estimate of the total mass.
pub fn integrate_geometric<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    ratio: f64,
    rel_tol: f64,
) -> f64 {
    assert!(a > 0.0 && b >= a && ratio > 1.0);
    // first pass: crude panel estimates to scale the per-panel tolerance
    let mut panels = Vec::new();
    let mut lo = a;
    while lo < b {
        let hi = (lo * ratio).min(b);
        panels.push((lo, hi));
        lo = hi;
    }
    let mut crude = 0.0;
    for &(lo, hi) in &panels {
        let m = (lo * hi).sqrt();
        crude += (hi - lo) * f(m).abs();
    }
    let scale = crude.max(f64::MIN_POSITIVE);
    let per_panel = rel_tol * scale / panels.len() as f64;
    panels
        .iter()
        .map(|&(lo, hi)| adaptive_simpson(f, lo, hi, per_panel))
        .sum()
}
