//! Slowly varying normalizer functions.
//!
//! A `SlowFunction` is a positive nondecreasing slowly varying `h`; the
//! induced normalizer is `Ψ(x) = √(x h(x))` with sequence `a_n = Ψ(n)`.
//! Everything evaluates through `ln h` as a function of `lx = L(x)`, so the
//! asymptotic diagnostics can push arguments to `x = exp(1e300)` without
//! overflow.
//!
//! The module also carries the membership diagnostic for the classes
//! `H_q` (super-slow variation against the probe family `f_τ`) and the
//! envelope-to-normalizer construction: given a slowly varying `φ` with
//! `limsup H/φ = 1`, iterate
//!
//! ```text
//! Ψ_{k+1}(x) = sqrt( x · φ(Ψ_k(x)/LLx) · LLx ),   Ψ_0(x) = sqrt(x LLx)
//! ```
//!
//! to the fixed point, yielding `h(x) = φ(Ψ(x)/LLx) · LLx`.

use crate::distmodel::DistributionSpec;
use crate::error::{Error, Result};
use crate::grid::AsymptoticGrid;
use crate::logscale::{l_of_ln, l_raw, EXP_OVERFLOW};
use crate::series::{self, SeriesVerdict};

const LN_2: f64 = std::f64::consts::LN_2;

/// Custom `h` table: interpolated monotonically in log-x, clamped outside
/// its range.
#[derive(Debug, Clone, PartialEq)]
pub struct SlowTable {
    ln_x: Vec<f64>,
    ln_h: Vec<f64>,
}

impl SlowTable {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Table("slow-function table needs at least two points".into()));
        }
        let mut ln_x = Vec::with_capacity(points.len());
        let mut ln_h = Vec::with_capacity(points.len());
        for (i, &(x, h)) in points.iter().enumerate() {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::Table(format!("abscissa {x} at row {i} must be positive")));
            }
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Table(format!("value {h} at row {i} must be positive")));
            }
            if let Some(&prev) = ln_x.last() {
                if x.ln() <= prev {
                    return Err(Error::Table(format!("abscissae not strictly increasing at row {i}")));
                }
            }
            if let Some(&prev) = ln_h.last() {
                if h.ln() < prev {
                    return Err(Error::Table(format!("values decrease at row {i}; h must be nondecreasing")));
                }
            }
            ln_x.push(x.ln());
            ln_h.push(h.ln());
        }
        Ok(SlowTable { ln_x, ln_h })
    }

    /// Parse the `# lil-slowfn v1` two-column text format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "# lil-slowfn v1" => {}
            other => {
                return Err(Error::Table(format!(
                    "missing header '# lil-slowfn v1', found {:?}",
                    other.unwrap_or("")
                )))
            }
        }
        let mut points = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let x: f64 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Table(format!("line {}: bad abscissa", lineno + 2)))?;
            let h: f64 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Table(format!("line {}: bad value", lineno + 2)))?;
            points.push((x, h));
        }
        SlowTable::new(points)
    }

    fn ln_eval(&self, ln_x: f64) -> f64 {
        let n = self.ln_x.len();
        if ln_x <= self.ln_x[0] {
            return self.ln_h[0];
        }
        if ln_x >= self.ln_x[n - 1] {
            return self.ln_h[n - 1];
        }
        let i = match self.ln_x.binary_search_by(|v| v.partial_cmp(&ln_x).unwrap()) {
            Ok(i) => return self.ln_h[i],
            Err(i) => i - 1,
        };
        let frac = (ln_x - self.ln_x[i]) / (self.ln_x[i + 1] - self.ln_x[i]);
        self.ln_h[i] + frac * (self.ln_h[i + 1] - self.ln_h[i])
    }
}

/// The fixed-point normalizer produced by [`construct_psi_from_phi`];
/// `h(x) = φ(Ψ(x)/LLx) · LLx` with `Ψ` solved per-x.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstructedPsi {
    phi: Box<SlowFunction>,
}

impl ConstructedPsi {
    /// Fixed point for `w` in `ln Ψ = u/2 + w`: iterating the remainder
    /// keeps the update visible at any depth (an absolute `O(1)` correction
    /// drowns in the rounding of `u/2` once `u` is astronomically large).
    /// Returns `(w, iterations, converged)` at `u = ln x`.
    fn remainder_at(&self, u: f64) -> (f64, usize, bool) {
        let ln_lln = l_raw(l_of_ln(u)).ln();
        let mut w = 0.5 * ln_lln;
        let mut prev_delta = 0.0f64;
        for k in 0..200 {
            let z_arg = 0.5 * u + w - ln_lln; // ln(Ψ/LLx)
            let z_lx = l_of_ln(z_arg);
            let target = 0.5 * (self.phi.ln_eval_lx(z_lx) + ln_lln);
            let mut delta = target - w;
            if k > 0 && delta * prev_delta < 0.0 {
                // oscillation: average consecutive iterates
                delta *= 0.5;
            }
            w += delta;
            if delta.abs() <= 1e-10 {
                return (w, k + 1, true);
            }
            prev_delta = delta;
        }
        (w, 200, false)
    }
}

/// A positive nondecreasing slowly varying function.
#[derive(Debug, Clone, PartialEq)]
pub enum SlowFunction {
    /// `h(x) = 2 (LLx)^p`, `p >= 0`.
    LogLogPower { p: f64 },
    /// `h(x) = 2 (Lx)^r`, `r > 0`.
    LogPower { r: f64 },
    /// `h(x) = exp((Lx)^q)`, `q ∈ (0, 1]`.
    Stretched { q: f64 },
    /// `φ₂(x) = 2 Lx (1 + LLx sin²(LLLx))` — the oscillating envelope of
    /// the Feller–Pruitt example.
    FellerPruittPhi2,
    /// `h(x) = c`, `c > 0`.
    Constant { c: f64 },
    /// Custom table.
    Table(SlowTable),
    /// `h(x) = κ · φ(x) · LLx` — the closed-form shape the envelope
    /// construction settles on for log-leading envelopes.
    ScaledPhiLL { phi: Box<SlowFunction>, kappa: f64 },
    /// `factor · base(x)`.
    Scaled { base: Box<SlowFunction>, factor: f64 },
    /// `h(x) = φ(Ψ(x)/LLx) · LLx` with `Ψ` the per-x fixed point.
    Constructed(ConstructedPsi),
}

impl SlowFunction {
    pub fn loglog_power(p: f64) -> Result<Self> {
        if !(p >= 0.0 && p.is_finite()) {
            return Err(Error::Domain { op: "loglog_power", message: "p must be >= 0", value: p });
        }
        Ok(SlowFunction::LogLogPower { p })
    }

    pub fn log_power(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain { op: "log_power", message: "r must be > 0", value: r });
        }
        Ok(SlowFunction::LogPower { r })
    }

    pub fn stretched(q: f64) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::Domain { op: "stretched", message: "q must lie in (0, 1]", value: q });
        }
        Ok(SlowFunction::Stretched { q })
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain { op: "constant", message: "c must be > 0", value: c });
        }
        Ok(SlowFunction::Constant { c })
    }

    pub fn scaled(base: SlowFunction, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::Domain { op: "scaled", message: "factor must be > 0", value: factor });
        }
        Ok(SlowFunction::Scaled { base: Box::new(base), factor })
    }

    pub fn scaled_phi_ll(phi: SlowFunction, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::Domain { op: "scaled_phi_ll", message: "kappa must be > 0", value: kappa });
        }
        Ok(SlowFunction::ScaledPhiLL { phi: Box::new(phi), kappa })
    }

    pub fn label(&self) -> String {
        match self {
            SlowFunction::LogLogPower { p } => format!("loglog-power(p={p})"),
            SlowFunction::LogPower { r } => format!("log-power(r={r})"),
            SlowFunction::Stretched { q } => format!("stretched(q={q})"),
            SlowFunction::FellerPruittPhi2 => "feller-pruitt-phi2".into(),
            SlowFunction::Constant { c } => format!("constant(c={c})"),
            SlowFunction::Table(t) => format!("table({} points)", t.ln_x.len()),
            SlowFunction::ScaledPhiLL { phi, kappa } => {
                format!("{}*LL*{kappa}", phi.label())
            }
            SlowFunction::Scaled { base, factor } => format!("{factor}*{}", base.label()),
            SlowFunction::Constructed(c) => format!("constructed[{}]", c.phi.label()),
        }
    }

    /// The `H_q` class parameter this family is known to satisfy; tables
    /// default to the conservative `q = 1`.
    pub fn q_class(&self) -> f64 {
        match self {
            SlowFunction::LogLogPower { .. }
            | SlowFunction::LogPower { .. }
            | SlowFunction::Constant { .. }
            | SlowFunction::FellerPruittPhi2 => 0.0,
            SlowFunction::Stretched { q } => *q,
            SlowFunction::Table(_) => 1.0,
            SlowFunction::ScaledPhiLL { phi, .. } => phi.q_class(),
            SlowFunction::Scaled { base, .. } => base.q_class(),
            SlowFunction::Constructed(c) => c.phi.q_class(),
        }
    }

    /// `ln h` as a function of `lx = L(x) >= 1`.
    pub fn ln_eval_lx(&self, lx: f64) -> f64 {
        let lx = lx.max(1.0);
        match self {
            SlowFunction::LogLogPower { p } => LN_2 + p * l_raw(lx).ln(),
            SlowFunction::LogPower { r } => LN_2 + r * lx.ln(),
            SlowFunction::Stretched { q } => lx.powf(*q),
            SlowFunction::FellerPruittPhi2 => {
                let llx = l_raw(lx);
                let lllx = l_raw(llx);
                LN_2 + lx.ln() + (1.0 + llx * lllx.sin().powi(2)).ln()
            }
            SlowFunction::Constant { c } => c.ln(),
            SlowFunction::Table(t) => t.ln_eval(lx),
            SlowFunction::ScaledPhiLL { phi, kappa } => {
                kappa.ln() + phi.ln_eval_lx(lx) + l_raw(lx).ln()
            }
            SlowFunction::Scaled { base, factor } => factor.ln() + base.ln_eval_lx(lx),
            SlowFunction::Constructed(c) => {
                // ln h = 2 ln Ψ - ln x = 2 w by the remainder split
                let (w, _, _) = c.remainder_at(lx);
                2.0 * w
            }
        }
    }

    /// `h(x)`; reports `+∞` instead of overflowing.
    pub fn eval(&self, x: f64) -> f64 {
        let v = self.ln_eval_lx(l_raw(x));
        if v > EXP_OVERFLOW {
            f64::INFINITY
        } else {
            v.exp()
        }
    }

    /// Positivity and monotonicity check on a dense log-x grid; exact
    /// families are nondecreasing by construction, but the oscillating and
    /// table/constructed families are verified numerically.
    pub fn validate(&self) -> Result<()> {
        match self {
            SlowFunction::FellerPruittPhi2
            | SlowFunction::Table(_)
            | SlowFunction::ScaledPhiLL { .. }
            | SlowFunction::Scaled { .. }
            | SlowFunction::Constructed(_) => {
                let mut prev = f64::NEG_INFINITY;
                let mut lx = 1.0f64;
                while lx <= 1e300 {
                    let v = self.ln_eval_lx(lx);
                    if !v.is_finite() {
                        return Err(Error::Domain {
                            op: "slow_function",
                            message: "h not finite/positive on grid",
                            value: lx,
                        });
                    }
                    if v < prev - 1e-9 {
                        return Err(Error::Domain {
                            op: "slow_function",
                            message: "h not nondecreasing on grid",
                            value: lx,
                        });
                    }
                    prev = v;
                    lx *= 1.35;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// `Ψ(x) = sqrt(x h(x))` with numeric inverse, and the sequence accessor
/// `a(n) = Ψ(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    h: SlowFunction,
}

impl Normalizer {
    pub fn new(h: SlowFunction) -> Result<Self> {
        h.validate()?;
        Ok(Normalizer { h })
    }

    pub fn h(&self) -> &SlowFunction {
        &self.h
    }

    pub fn label(&self) -> String {
        format!("psi[{}]", self.h.label())
    }

    /// `ln Ψ(x)` at `u = ln x`.
    pub fn ln_psi(&self, u: f64) -> f64 {
        0.5 * (u + self.h.ln_eval_lx(l_of_ln(u)))
    }

    /// `Ψ(x)`; `Ψ(0) = 0`, `+∞` on overflow.
    pub fn psi(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::Domain { op: "psi", message: "x must be finite and nonnegative", value: x });
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        let v = self.ln_psi(x.ln());
        Ok(if v > EXP_OVERFLOW { f64::INFINITY } else { v.exp() })
    }

    /// `a_n = Ψ(n)`.
    pub fn a(&self, n: u64) -> f64 {
        self.psi(n as f64).expect("n >= 0 is always in domain")
    }

    /// `ln Ψ^{-1}(y)` at `ln y`: the unique `u` with `ln Ψ(e^u) = ln y`,
    /// found by a seeded doubling bracket and bisection.
    pub fn ln_psi_inverse(&self, ln_y: f64) -> Result<f64> {
        let target = ln_y;
        let f = |u: f64| self.ln_psi(u) - target;
        // seed from u ≈ 2 ln y - ln h evaluated there; for slowly varying h
        // this lands within a few units of the root at any depth
        let seed = 2.0 * ln_y - self.h.ln_eval_lx(l_of_ln(2.0 * ln_y));
        let mut lo = seed;
        let mut hi = seed;
        let mut step = 1.0;
        let mut steps = 0;
        while f(lo) > 0.0 {
            lo -= step;
            step *= 2.0;
            steps += 1;
            if steps > 2100 {
                return Err(Error::BracketFailure { op: "psi_inverse", target: ln_y });
            }
        }
        step = 1.0;
        steps = 0;
        while f(hi) < 0.0 {
            hi += step;
            step *= 2.0;
            steps += 1;
            if steps > 2100 {
                return Err(Error::BracketFailure { op: "psi_inverse", target: ln_y });
            }
        }
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= 1e-13 * hi.abs().max(1.0) {
                break;
            }
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// `ln Ψ^{-1}(y) - 2 ln y`, which equals `-ln h(Ψ^{-1}(y))` exactly;
    /// this is the quantity the asymptotic ratios need, free of the
    /// `u`-scale cancellation that plagues the raw logs at depth.
    pub fn ln_psi_inverse_defect(&self, ln_y: f64) -> Result<f64> {
        let z_ln = self.ln_psi_inverse(ln_y)?;
        Ok(-self.h.ln_eval_lx(l_of_ln(z_ln)))
    }

    /// `Ψ^{-1}(y)`; rejects `y < 0` (below `Ψ(0) = 0`).
    pub fn psi_inverse(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) || !y.is_finite() {
            return Err(Error::Domain {
                op: "psi_inverse",
                message: "y must be finite and >= Psi(0) = 0",
                value: y,
            });
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        let u = self.ln_psi_inverse(y.ln())?;
        Ok(if u > EXP_OVERFLOW { f64::INFINITY } else { u.exp() })
    }
}

/// Trend of the deviation `|h(t f_τ(t))/h(t) - 1|` across the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeviationTrend {
    Decreasing,
    Flat,
    Increasing,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TauDiagnostic {
    pub tau: f64,
    /// max |ratio - 1| over the last decade-chunk of the usable grid.
    pub last_window_max_dev: f64,
    pub trend: DeviationTrend,
    /// evaluations whose ratio overflowed (excluded from the deviation max).
    pub overflow_excluded: usize,
    /// grid points past the depth where the shift `t ↦ t f_τ(t)` is still
    /// representable in double precision (excluded with a warning).
    pub depth_excluded: usize,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct HqReport {
    pub q: f64,
    pub per_tau: Vec<TauDiagnostic>,
    /// true iff every τ shows a decreasing (or converged) deviation trend.
    pub consistent: bool,
}

/// Diagnose membership of `h` in `H_q`: for each `τ ∈ (0, 1-q)` the ratio
/// `h(t f_τ(t))/h(t)` must tend to 1.
pub fn hq_membership(
    h: &SlowFunction,
    q: f64,
    tau_grid: &[f64],
    ln_t_grid: &[f64],
) -> Result<HqReport> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain { op: "hq_membership", message: "q must lie in [0, 1]", value: q });
    }
    if tau_grid.is_empty() || ln_t_grid.len() < 12 {
        return Err(Error::Config("hq_membership needs a tau grid and >= 12 grid points".into()));
    }
    for &tau in tau_grid {
        if !(tau > 0.0 && tau < 1.0 - q + 1e-12) {
            return Err(Error::Domain {
                op: "hq_membership",
                message: "tau grid must lie in (0, 1-q)",
                value: tau,
            });
        }
    }
    let mut per_tau = Vec::with_capacity(tau_grid.len());
    for &tau in tau_grid {
        // beyond this depth the additive shift (Lt)^τ falls under the
        // rounding ulp of ln t and the ratio degenerates to 1 spuriously
        let u_cap = if tau < 1.0 { 2f64.powf(48.0 / (1.0 - tau)) } else { f64::INFINITY };
        let mut devs = Vec::with_capacity(ln_t_grid.len());
        let mut overflow = 0usize;
        let mut depth_excluded = 0usize;
        for &u in ln_t_grid {
            if u > u_cap {
                depth_excluded += 1;
                continue;
            }
            let lx = l_of_ln(u);
            let shifted = l_of_ln(u + crate::logscale::ln_f_tau_of_ln(u, tau));
            let delta = h.ln_eval_lx(shifted) - h.ln_eval_lx(lx);
            if delta > EXP_OVERFLOW {
                overflow += 1;
                devs.push(f64::INFINITY);
            } else {
                devs.push((delta.exp() - 1.0).abs());
            }
        }
        // chunk the deviation sequence and look at the trailing behavior
        let chunks = 6usize;
        let len = devs.len() / chunks;
        let chunk_max: Vec<f64> = (0..chunks)
            .map(|c| {
                devs[c * len..((c + 1) * len).min(devs.len())]
                    .iter()
                    .cloned()
                    .fold(0.0f64, f64::max)
            })
            .collect();
        let (d1, d2, d3) = (chunk_max[chunks - 3], chunk_max[chunks - 2], chunk_max[chunks - 1]);
        let trend = if d3 <= 1e-9 || (d3 < 0.9 * d2 && d2 < 0.9 * d1) {
            DeviationTrend::Decreasing
        } else if d3 > 1.1 * d2 || d3.is_infinite() {
            DeviationTrend::Increasing
        } else {
            DeviationTrend::Flat
        };
        per_tau.push(TauDiagnostic {
            tau,
            last_window_max_dev: d3,
            trend,
            overflow_excluded: overflow,
            depth_excluded,
        });
    }
    let consistent = per_tau
        .iter()
        .all(|d| d.trend == DeviationTrend::Decreasing || d.last_window_max_dev <= 1e-9);
    Ok(HqReport { q, per_tau, consistent })
}

/// Report from the envelope construction.
#[derive(Debug, Clone)]
pub struct ConstructionReport {
    /// Trailing-window sup of the envelope diagnostic `H(x)/φ(x)`.
    pub envelope_sup: f64,
    /// Set when the envelope sup strays from 1 by more than 25%.
    pub envelope_warning: bool,
    /// Verdict for `E( X² / (φ(|X|/LL|X|) LL|X|) )`.
    pub moment_verdict: SeriesVerdict,
    pub moment_blocks: Vec<f64>,
    /// Closed-form normalizer `h(x) = κ φ(x) LLx` for log-leading envelopes;
    /// the fixed point settles on this shape asymptotically and output
    /// tables emit it.
    pub closed_form: Option<Normalizer>,
    /// Worst-case fixed-point iteration count over the validation grid.
    pub fixed_point_max_iters: usize,
}

pub struct PsiConstruction {
    pub normalizer: Normalizer,
    pub report: ConstructionReport,
}

/// Build `Ψ` from a slowly varying envelope `φ` of `H` and report the
/// accompanying moment-condition verdict.
pub fn construct_psi_from_phi(
    dist: &DistributionSpec,
    phi: &SlowFunction,
) -> Result<PsiConstruction> {
    phi.validate()?;
    let grid = AsymptoticGrid::default_deep();

    // envelope diagnostic: trailing-window sup of H/φ (warning only)
    let mut sup = f64::NEG_INFINITY;
    for &u in grid.trailing(0.5) {
        let v = dist.ln_h(u) - phi.ln_eval_lx(l_of_ln(u));
        if v.is_finite() {
            sup = sup.max(v);
        }
    }
    let envelope_sup = sup.exp();
    let envelope_warning = !(0.75..=1.25).contains(&envelope_sup);

    // fixed-point normalizer, with convergence validated across the grid
    let constructed = ConstructedPsi { phi: Box::new(phi.clone()) };
    let mut max_iters = 0usize;
    for &u in &grid.ln_x {
        let (w, iters, converged) = constructed.remainder_at(l_of_ln(u));
        if !converged {
            return Err(Error::NonConvergence {
                op: "construct_psi_from_phi",
                iterations: iters,
                last: w,
            });
        }
        max_iters = max_iters.max(iters);
    }
    let normalizer = Normalizer::new(SlowFunction::Constructed(constructed))?;

    // moment-condition verdict: E X²/D(|X|) with D(s) = φ(s/LLs)·LLs,
    // integrated by parts against the tail
    let ln_d = |u: f64| {
        let lls = l_raw(l_of_ln(u));
        phi.ln_eval_lx(l_of_ln(u - lls.ln())) + lls.ln()
    };
    let ln_density = |u: f64| LN_2 + dist.ln_x2_tail(u) - ln_d(u);
    let moment_blocks = series::exponent_dyadic_integral_blocks(&ln_density, 995);
    let moment_verdict = series::classify_blocks(&moment_blocks, 0).verdict;

    // closed-form shape for log-leading envelopes: φ(Ψ/LLx) ≈ κ φ(x) with
    // κ = φ(√x)/φ(x) in the limit
    let kappa = match phi {
        SlowFunction::LogPower { r } => Some(0.5f64.powf(*r)),
        SlowFunction::FellerPruittPhi2 => Some(0.5),
        SlowFunction::LogLogPower { .. } | SlowFunction::Constant { .. } => Some(1.0),
        _ => None,
    };
    let closed_form = match kappa {
        Some(k) => Some(Normalizer::new(SlowFunction::scaled_phi_ll(phi.clone(), k)?)?),
        None => None,
    };

    Ok(PsiConstruction {
        normalizer,
        report: ConstructionReport {
            envelope_sup,
            envelope_warning,
            moment_verdict,
            moment_blocks,
            closed_form,
            fixed_point_max_iters: max_iters,
        },
    })
}
