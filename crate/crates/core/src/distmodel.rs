//! Distribution models: tails, truncated moments and sampling.
//!
//! Every law here is symmetric about zero, so it is mean-zero whenever
//! `E|X| < ∞`.  The two truncated-moment functionals everything else is
//! built on are
//!
//! ```text
//! H(t) = E X^2 1{|X| <= t},      M(t) = E|X| 1{|X| > t}.
//! ```
//!
//! Built-in families carry closed forms; tail tables are integrated through
//! the tail-function identities
//!
//! ```text
//! H(t) = 2 ∫_0^t s P(|X|>s) ds - t^2 P(|X|>t),
//! M(t) = t P(|X|>t) + ∫_t^∞ P(|X|>s) ds,
//! ```
//!
//! which also serve as the independent quadrature route used to cross-check
//! the closed forms.
//!
//! Evaluations are available both at linear arguments and on the log scale
//! (`ln_tail`, `ln_h`, `ln_m` take `ln t`), because the asymptotic
//! diagnostics probe arguments far beyond `f64::MAX`.

use crate::error::{Error, Result};
use crate::quad;
use crate::rng::Substream;

const SQRT_2PI: f64 = 2.5066282746310002;
const LN_2: f64 = std::f64::consts::LN_2;

/// A possibly divergent moment value.  Divergence is carried as a flag so
/// that no `+inf` ever enters arithmetic downstream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment {
    Finite(f64),
    Divergent,
}

impl Moment {
    pub fn finite(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Divergent => None,
        }
    }

    pub fn is_divergent(self) -> bool {
        matches!(self, Moment::Divergent)
    }
}

/// A tail probability together with an extrapolation flag.  The flag is set
/// when a tail-table evaluation had to extend beyond the last tabulated
/// abscissa using the fitted power law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailProb {
    pub value: f64,
    pub extrapolated: bool,
}

impl TailProb {
    fn exact(value: f64) -> Self {
        TailProb { value, extrapolated: false }
    }
}

/// Tabulated tail: strictly increasing abscissae, strictly decreasing
/// probabilities, log-log interpolation in between and a fitted power law
/// above the table.  Mass not accounted for by the first point sits in an
/// atom at zero, which keeps the table a complete law for sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct TailTable {
    ts: Vec<f64>,
    ps: Vec<f64>,
    /// Power-law exponent fitted from the last two positive-probability
    /// points; `None` when the tail hits exactly zero inside the table.
    fit_beta: Option<f64>,
}

impl TailTable {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Table("tail table has no points".into()));
        }
        let mut ts = Vec::with_capacity(points.len());
        let mut ps = Vec::with_capacity(points.len());
        for (i, &(t, p)) in points.iter().enumerate() {
            if !t.is_finite() || t <= 0.0 {
                return Err(Error::Table(format!("abscissa {t} at row {i} must be positive")));
            }
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::Table(format!("probability {p} at row {i} outside [0, 1]")));
            }
            if let Some(&prev) = ts.last() {
                if t <= prev {
                    return Err(Error::Table(format!("abscissae not strictly increasing at row {i}")));
                }
            }
            if let Some(&prev) = ps.last() {
                if p >= prev {
                    return Err(Error::Table(format!("probabilities not strictly decreasing at row {i}")));
                }
            }
            ts.push(t);
            ps.push(p);
        }
        let n = ts.len();
        let fit_beta = if ps[n - 1] == 0.0 {
            None
        } else if n >= 2 {
            let (t0, p0, t1, p1) = (ts[n - 2], ps[n - 2], ts[n - 1], ps[n - 1]);
            Some((p0 / p1).ln() / (t1 / t0).ln())
        } else {
            return Err(Error::Table(
                "single-point table with positive tail cannot be extended; add a second point or end at 0".into(),
            ));
        };
        Ok(TailTable { ts, ps, fit_beta })
    }

    /// Parse the `# lil-tail-table v1` two-column text format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "# lil-tail-table v1" => {}
            other => {
                return Err(Error::Table(format!(
                    "missing header '# lil-tail-table v1', found {:?}",
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
            let t: f64 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Table(format!("line {}: bad abscissa", lineno + 2)))?;
            let p: f64 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Table(format!("line {}: bad probability", lineno + 2)))?;
            points.push((t, p));
        }
        TailTable::new(points)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# lil-tail-table v1\n");
        for (t, p) in self.ts.iter().zip(&self.ps) {
            out.push_str(&format!("{t} {p}\n"));
        }
        out
    }

    fn tail(&self, t: f64) -> TailProb {
        let n = self.ts.len();
        if t < self.ts[0] {
            return TailProb::exact(self.ps[0]);
        }
        if t >= self.ts[n - 1] {
            let p_last = self.ps[n - 1];
            if p_last == 0.0 {
                return TailProb::exact(0.0);
            }
            if t == self.ts[n - 1] {
                return TailProb::exact(p_last);
            }
            let beta = self.fit_beta.expect("positive tail end always has a fit");
            let v = p_last * (t / self.ts[n - 1]).powf(-beta);
            return TailProb { value: v, extrapolated: true };
        }
        let i = match self.ts.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return TailProb::exact(self.ps[i]),
            Err(i) => i - 1,
        };
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let (p0, p1) = (self.ps[i], self.ps[i + 1]);
        let frac = (t / t0).ln() / (t1 / t0).ln();
        if p1 == 0.0 {
            // last segment hits zero: interpolate linearly in log-abscissa
            return TailProb::exact(p0 * (1.0 - frac));
        }
        TailProb::exact(p0 * (p1 / p0).powf(frac))
    }

    fn ln_tail(&self, ln_t: f64) -> (f64, bool) {
        let n = self.ts.len();
        let ln_last = self.ts[n - 1].ln();
        if ln_t > ln_last {
            let p_last = self.ps[n - 1];
            if p_last == 0.0 {
                return (f64::NEG_INFINITY, false);
            }
            let beta = self.fit_beta.expect("fit exists");
            return (p_last.ln() - beta * (ln_t - ln_last), true);
        }
        let v = self.tail(ln_t.exp()).value;
        (if v > 0.0 { v.ln() } else { f64::NEG_INFINITY }, false)
    }

    /// Inverse of the tail function; `u` must lie in (0, 1).
    fn quantile_abs(&self, u: f64) -> f64 {
        let n = self.ts.len();
        if u >= self.ps[0] {
            return 0.0; // atom at the origin carries the unaccounted mass
        }
        if u < self.ps[n - 1] {
            let beta = self.fit_beta.expect("u below a zero tail is impossible for u > 0");
            return self.ts[n - 1] * (u / self.ps[n - 1]).powf(-1.0 / beta);
        }
        // find segment with ps[i+1] <= u < ps[i]
        let (mut lo, mut hi) = (0usize, n - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.ps[mid] > u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (t0, t1) = (self.ts[lo], self.ts[hi]);
        let (p0, p1) = (self.ps[lo], self.ps[hi]);
        if p1 == 0.0 {
            let frac = 1.0 - u / p0;
            return t0 * (t1 / t0).powf(frac);
        }
        let frac = (u / p0).ln() / (p1 / p0).ln();
        t0 * (t1 / t0).powf(frac)
    }
}

/// A mean-zero symmetric law.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSpec {
    /// P(X = 1) = P(X = -1) = 1/2.
    Rademacher,
    /// Centered normal with standard deviation `sigma`.
    Gaussian { sigma: f64 },
    /// Symmetric Pareto: density (beta xmin^beta / 2) |x|^-(beta+1) on |x| >= xmin.
    SymPareto { beta: f64, xmin: f64 },
    /// Law given by its tail function.
    TailTable(TailTable),
    /// `c · X` for a base law `X`.
    Scaled { base: Box<DistributionSpec>, c: f64 },
}

impl DistributionSpec {
    /// The Feller–Pruitt example law: density |x|^-3 on |x| >= 1.
    pub fn feller_pruitt() -> Self {
        DistributionSpec::SymPareto { beta: 2.0, xmin: 1.0 }
    }

    pub fn scaled(base: DistributionSpec, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain { op: "scaled", message: "scale must be positive", value: c });
        }
        Ok(DistributionSpec::Scaled { base: Box::new(base), c })
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain { op: "gaussian", message: "sigma must be positive", value: sigma });
        }
        Ok(DistributionSpec::Gaussian { sigma })
    }

    pub fn sym_pareto(beta: f64, xmin: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain { op: "sym_pareto", message: "beta must be positive", value: beta });
        }
        if !(xmin > 0.0 && xmin.is_finite()) {
            return Err(Error::Domain { op: "sym_pareto", message: "xmin must be positive", value: xmin });
        }
        Ok(DistributionSpec::SymPareto { beta, xmin })
    }

    pub fn label(&self) -> String {
        match self {
            DistributionSpec::Rademacher => "rademacher".into(),
            DistributionSpec::Gaussian { sigma } => format!("gaussian(sigma={sigma})"),
            DistributionSpec::SymPareto { beta, xmin } => format!("sym-pareto(beta={beta}, xmin={xmin})"),
            DistributionSpec::TailTable(t) => format!("tail-table({} points)", t.ts.len()),
            DistributionSpec::Scaled { base, c } => format!("{c}*{}", base.label()),
        }
    }

    fn check_t(t: f64, op: &'static str) -> Result<()> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Domain { op, message: "t must be finite and nonnegative", value: t });
        }
        Ok(())
    }

    /// P(|X| > t).
    pub fn tail(&self, t: f64) -> Result<TailProb> {
        Self::check_t(t, "tail")?;
        Ok(match self {
            DistributionSpec::Rademacher => TailProb::exact(if t < 1.0 { 1.0 } else { 0.0 }),
            DistributionSpec::Gaussian { sigma } => {
                TailProb::exact(libm::erfc(t / (sigma * std::f64::consts::SQRT_2)))
            }
            DistributionSpec::SymPareto { beta, xmin } => {
                TailProb::exact(if t <= *xmin { 1.0 } else { (xmin / t).powf(*beta) })
            }
            DistributionSpec::TailTable(tab) => tab.tail(t),
            DistributionSpec::Scaled { base, c } => base.tail(t / c)?,
        })
    }

    /// `ln P(|X| > t)` with the argument given as `ln t`; `-inf` when the
    /// tail vanishes beyond double precision.  The flag mirrors [`Self::tail`].
    pub fn ln_tail(&self, ln_t: f64) -> (f64, bool) {
        match self {
            DistributionSpec::Rademacher => {
                (if ln_t < 0.0 { 0.0 } else { f64::NEG_INFINITY }, false)
            }
            DistributionSpec::Gaussian { sigma } => {
                let ln_z = ln_t - sigma.ln() - 0.5 * LN_2;
                if ln_z > 3.2 {
                    // z > ~25: erfc underflow region, use the asymptotic form
                    let two_ln_z = 2.0 * ln_z;
                    if two_ln_z > 709.0 {
                        return (f64::NEG_INFINITY, false);
                    }
                    let z2 = two_ln_z.exp();
                    let v = -z2 - ln_z - 0.5 * std::f64::consts::PI.ln()
                        + (-1.0 / (2.0 * z2)).ln_1p();
                    (v, false)
                } else {
                    let v = libm::erfc((ln_t.exp()) / (sigma * std::f64::consts::SQRT_2));
                    (if v > 0.0 { v.ln() } else { f64::NEG_INFINITY }, false)
                }
            }
            DistributionSpec::SymPareto { beta, xmin } => {
                let ln_xmin = xmin.ln();
                (if ln_t <= ln_xmin { 0.0 } else { beta * (ln_xmin - ln_t) }, false)
            }
            DistributionSpec::TailTable(tab) => tab.ln_tail(ln_t),
            DistributionSpec::Scaled { base, c } => base.ln_tail(ln_t - c.ln()),
        }
    }

    /// `ln P(|X| > c) + u` for `c = exp(k·u + r)`: the tail series density
    /// on the `u = ln n` axis, assembled so the `u`-scale parts cancel in
    /// coefficient arithmetic (at `u ~ 1e300` they dwarf every slowly
    /// varying term).
    pub fn ln_tail_shifted(&self, k: f64, r: f64, u: f64) -> f64 {
        match self {
            DistributionSpec::Rademacher => {
                if k * u + r < 0.0 {
                    u
                } else {
                    f64::NEG_INFINITY
                }
            }
            DistributionSpec::Gaussian { .. } => {
                // the gaussian tail is only representable for c ≲ 30σ, i.e.
                // small u; beyond that the terms vanish identically
                let ln_c = k * u + r;
                let (lt, _) = self.ln_tail(ln_c);
                if lt == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else {
                    u + lt
                }
            }
            DistributionSpec::SymPareto { beta, xmin } => {
                let ln_xmin = xmin.ln();
                if k * u + r <= ln_xmin {
                    u
                } else {
                    (1.0 - beta * k) * u + beta * (ln_xmin - r)
                }
            }
            DistributionSpec::TailTable(tab) => {
                let n = tab.ts.len();
                let ln_last = tab.ts[n - 1].ln();
                let ln_c = k * u + r;
                if ln_c <= ln_last {
                    // inside the table the abscissae are representable and
                    // u is necessarily moderate
                    let (lt, _) = tab.ln_tail(ln_c);
                    if lt == f64::NEG_INFINITY {
                        f64::NEG_INFINITY
                    } else {
                        u + lt
                    }
                } else if tab.ps[n - 1] == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    let b = tab.fit_beta.expect("fit exists");
                    (1.0 - b * k) * u + tab.ps[n - 1].ln() + b * (ln_last - r)
                }
            }
            DistributionSpec::Scaled { base, c } => base.ln_tail_shifted(k, r - c.ln(), u),
        }
    }

    /// `ln( s² P(|X| > s) )` at `u = ln s`, cancellation-free in `u`; the
    /// density of `E X²/D(|X|)`-type integrals up to the slowly varying
    /// `D`.
    pub fn ln_x2_tail(&self, u: f64) -> f64 {
        match self {
            DistributionSpec::Rademacher => {
                if u < 0.0 {
                    2.0 * u
                } else {
                    f64::NEG_INFINITY
                }
            }
            DistributionSpec::Gaussian { .. } => {
                let (lt, _) = self.ln_tail(u);
                if lt == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else {
                    2.0 * u + lt
                }
            }
            DistributionSpec::SymPareto { beta, xmin } => {
                let ln_xmin = xmin.ln();
                if u <= ln_xmin {
                    2.0 * u
                } else {
                    (2.0 - beta) * u + beta * ln_xmin
                }
            }
            DistributionSpec::TailTable(tab) => {
                let n = tab.ts.len();
                let ln_last = tab.ts[n - 1].ln();
                if u <= ln_last {
                    let (lt, _) = tab.ln_tail(u);
                    if lt == f64::NEG_INFINITY {
                        f64::NEG_INFINITY
                    } else {
                        2.0 * u + lt
                    }
                } else if tab.ps[n - 1] == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    let b = tab.fit_beta.expect("fit exists");
                    (2.0 - b) * u + tab.ps[n - 1].ln() + b * ln_last
                }
            }
            DistributionSpec::Scaled { base, c } => 2.0 * c.ln() + base.ln_x2_tail(u - c.ln()),
        }
    }

    /// H(t) = E X^2 1{|X| <= t}, closed form where available.
    pub fn h(&self, t: f64) -> Result<f64> {
        Self::check_t(t, "H")?;
        Ok(match self {
            DistributionSpec::Rademacher => {
                if t < 1.0 {
                    0.0
                } else {
                    1.0
                }
            }
            DistributionSpec::Gaussian { sigma } => {
                let u = t / sigma;
                let phi = (-0.5 * u * u).exp() / SQRT_2PI;
                sigma * sigma * (libm::erf(u / std::f64::consts::SQRT_2) - 2.0 * u * phi)
            }
            DistributionSpec::SymPareto { beta, xmin } => {
                if t <= *xmin {
                    0.0
                } else if (*beta - 2.0).abs() < 1e-12 {
                    2.0 * xmin * xmin * (t / xmin).ln()
                } else {
                    beta * xmin.powf(*beta) * (t.powf(2.0 - beta) - xmin.powf(2.0 - beta))
                        / (2.0 - beta)
                }
            }
            DistributionSpec::TailTable(_) => self.h_quadrature(t, 1e-10)?,
            DistributionSpec::Scaled { base, c } => c * c * base.h(t / c)?,
        })
    }

    /// `ln H(t)` with the argument given as `ln t`.
    pub fn ln_h(&self, ln_t: f64) -> f64 {
        match self {
            DistributionSpec::Rademacher => {
                if ln_t < 0.0 {
                    f64::NEG_INFINITY
                } else {
                    0.0
                }
            }
            DistributionSpec::Gaussian { sigma } => {
                if ln_t - sigma.ln() > 3.7 {
                    // t > ~40 sigma: H is sigma^2 to all double precision
                    2.0 * sigma.ln()
                } else {
                    let v = self.h(ln_t.exp()).expect("finite ln_t");
                    if v > 0.0 {
                        v.ln()
                    } else {
                        f64::NEG_INFINITY
                    }
                }
            }
            DistributionSpec::SymPareto { beta, xmin } => {
                let ln_xmin = xmin.ln();
                if ln_t <= ln_xmin {
                    return f64::NEG_INFINITY;
                }
                if (*beta - 2.0).abs() < 1e-12 {
                    (2.0 * xmin * xmin).ln() + (ln_t - ln_xmin).ln()
                } else if *beta < 2.0 {
                    // H ~ beta xmin^beta t^(2-beta) / (2-beta)
                    let lead = (beta / (2.0 - beta)).ln() + beta * ln_xmin + (2.0 - beta) * ln_t;
                    let corr_exp = (2.0 - beta) * (ln_xmin - ln_t);
                    lead + if corr_exp > -700.0 { (-corr_exp.exp()).ln_1p() } else { 0.0 }
                } else {
                    // H -> E X^2 from below
                    let ex2 = (beta / (beta - 2.0)).ln() + 2.0 * ln_xmin;
                    let corr_exp = (2.0 - beta) * (ln_t - ln_xmin);
                    ex2 + if corr_exp > -700.0 { (-corr_exp.exp()).ln_1p() } else { 0.0 }
                }
            }
            DistributionSpec::TailTable(tab) => {
                let n = tab.ts.len();
                let ln_last = tab.ts[n - 1].ln();
                if ln_t <= ln_last + LN_2 {
                    let v = self.h_quadrature(ln_t.exp(), 1e-10).unwrap_or(0.0);
                    return if v > 0.0 { v.ln() } else { f64::NEG_INFINITY };
                }
                // beyond the table: H(t) = H(T) + 2 \int_T^t s p_T (s/T)^-b ds
                let t_edge = tab.ts[n - 1] * 2.0;
                let h_edge = self.h_quadrature(t_edge, 1e-10).unwrap_or(0.0);
                let p_last = tab.ps[n - 1];
                if p_last == 0.0 {
                    return if h_edge > 0.0 { h_edge.ln() } else { f64::NEG_INFINITY };
                }
                let b = tab.fit_beta.expect("fit exists");
                let (ln_p_edge, _) = tab.ln_tail(t_edge.ln());
                let ln_t_edge = t_edge.ln();
                if (b - 2.0).abs() < 1e-9 {
                    // 2 p_edge T^2 ln(t/T) growth
                    let add = LN_2 + ln_p_edge + 2.0 * ln_t_edge + (ln_t - ln_t_edge).ln();
                    log_sum_exp(if h_edge > 0.0 { h_edge.ln() } else { f64::NEG_INFINITY }, add)
                } else if b < 2.0 {
                    let add = (2.0 / (2.0 - b)).ln() + ln_p_edge + b * ln_t_edge + (2.0 - b) * ln_t;
                    log_sum_exp(if h_edge > 0.0 { h_edge.ln() } else { f64::NEG_INFINITY }, add)
                } else {
                    let total = h_edge
                        + 2.0 * ln_p_edge.exp() * t_edge * t_edge / (b - 2.0)
                            * (1.0 - ((2.0 - b) * (ln_t - ln_t_edge)).exp());
                    if total > 0.0 {
                        total.ln()
                    } else {
                        f64::NEG_INFINITY
                    }
                }
            }
            DistributionSpec::Scaled { base, c } => 2.0 * c.ln() + base.ln_h(ln_t - c.ln()),
        }
    }

    /// M(t) = E|X| 1{|X| > t}; requires E|X| < ∞.
    pub fn m(&self, t: f64) -> Result<f64> {
        Self::check_t(t, "M")?;
        match self {
            DistributionSpec::Rademacher => Ok(if t < 1.0 { 1.0 } else { 0.0 }),
            DistributionSpec::Gaussian { sigma } => {
                let u = t / sigma;
                Ok(2.0 * sigma * (-0.5 * u * u).exp() / SQRT_2PI)
            }
            DistributionSpec::SymPareto { beta, xmin } => {
                if *beta <= 1.0 {
                    return Err(Error::InfiniteMean { beta: *beta });
                }
                Ok(beta * xmin.powf(*beta) * t.max(*xmin).powf(1.0 - beta) / (beta - 1.0))
            }
            DistributionSpec::TailTable(tab) => {
                if let Some(b) = tab.fit_beta {
                    if b <= 1.0 {
                        return Err(Error::InfiniteMean { beta: b });
                    }
                }
                self.m_quadrature(t, 1e-10)
            }
            DistributionSpec::Scaled { base, c } => Ok(c * base.m(t / c)?),
        }
    }

    /// `ln M(t)` with the argument given as `ln t`.
    pub fn ln_m(&self, ln_t: f64) -> Result<f64> {
        match self {
            DistributionSpec::Rademacher => Ok(if ln_t < 0.0 { 0.0 } else { f64::NEG_INFINITY }),
            DistributionSpec::Gaussian { sigma } => {
                let e = 2.0 * (ln_t - sigma.ln());
                if e > 709.0 {
                    return Ok(f64::NEG_INFINITY);
                }
                Ok((2.0 * sigma / SQRT_2PI).ln() - 0.5 * e.exp())
            }
            DistributionSpec::SymPareto { beta, xmin } => {
                if *beta <= 1.0 {
                    return Err(Error::InfiniteMean { beta: *beta });
                }
                Ok((beta / (beta - 1.0)).ln() + beta * xmin.ln()
                    + (1.0 - beta) * ln_t.max(xmin.ln()))
            }
            DistributionSpec::TailTable(tab) => {
                let n = tab.ts.len();
                let ln_last = tab.ts[n - 1].ln();
                if ln_t <= ln_last {
                    let v = self.m(ln_t.exp())?;
                    return Ok(if v > 0.0 { v.ln() } else { f64::NEG_INFINITY });
                }
                let p_last = tab.ps[n - 1];
                if p_last == 0.0 {
                    return Ok(f64::NEG_INFINITY);
                }
                let b = tab.fit_beta.expect("fit exists");
                if b <= 1.0 {
                    return Err(Error::InfiniteMean { beta: b });
                }
                // beyond the table the law is the fitted power tail exactly:
                // M(t) = t p(t) + t p(t)/(b-1) = p(t) t b/(b-1)
                let (ln_p, _) = tab.ln_tail(ln_t);
                Ok(ln_p + ln_t + (b / (b - 1.0)).ln())
            }
            DistributionSpec::Scaled { base, c } => Ok(c.ln() + base.ln_m(ln_t - c.ln())?),
        }
    }

    /// E X^2, divergence-flagged.
    pub fn second_moment(&self) -> Moment {
        match self {
            DistributionSpec::Rademacher => Moment::Finite(1.0),
            DistributionSpec::Gaussian { sigma } => Moment::Finite(sigma * sigma),
            DistributionSpec::SymPareto { beta, xmin } => {
                if *beta > 2.0 {
                    Moment::Finite(beta * xmin * xmin / (beta - 2.0))
                } else {
                    Moment::Divergent
                }
            }
            DistributionSpec::TailTable(tab) => match tab.fit_beta {
                None => {
                    let t_end = tab.ts[tab.ts.len() - 1];
                    Moment::Finite(self.h_quadrature(t_end * 2.0, 1e-10).unwrap_or(0.0))
                }
                Some(b) if b > 2.0 => {
                    let t_end = tab.ts[tab.ts.len() - 1];
                    let h_end = self.h_quadrature(t_end, 1e-10).unwrap_or(0.0);
                    let p_end = tab.ps[tab.ts.len() - 1];
                    Moment::Finite(h_end + 2.0 * p_end * t_end * t_end / (b - 2.0))
                }
                Some(_) => Moment::Divergent,
            },
            DistributionSpec::Scaled { base, c } => match base.second_moment() {
                Moment::Finite(v) => Moment::Finite(c * c * v),
                Moment::Divergent => Moment::Divergent,
            },
        }
    }

    /// E|X|, divergence-flagged.
    pub fn abs_mean(&self) -> Moment {
        match self {
            DistributionSpec::Rademacher => Moment::Finite(1.0),
            DistributionSpec::Gaussian { sigma } => {
                Moment::Finite(sigma * (2.0 / std::f64::consts::PI).sqrt())
            }
            DistributionSpec::SymPareto { beta, xmin } => {
                if *beta > 1.0 {
                    Moment::Finite(beta * xmin / (beta - 1.0))
                } else {
                    Moment::Divergent
                }
            }
            DistributionSpec::TailTable(tab) => match tab.fit_beta {
                Some(b) if b <= 1.0 => Moment::Divergent,
                _ => Moment::Finite(self.m_quadrature(0.0, 1e-10).unwrap_or(0.0)),
            },
            DistributionSpec::Scaled { base, c } => match base.abs_mean() {
                Moment::Finite(v) => Moment::Finite(c * v),
                Moment::Divergent => Moment::Divergent,
            },
        }
    }

    /// Abscissae where the tail has a kink or jump; quadrature panels split
    /// there.
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            DistributionSpec::Rademacher => vec![1.0],
            DistributionSpec::Gaussian { .. } => vec![],
            DistributionSpec::SymPareto { xmin, .. } => vec![*xmin],
            DistributionSpec::TailTable(tab) => tab.ts.clone(),
            DistributionSpec::Scaled { base, c } => {
                base.breakpoints().iter().map(|b| b * c).collect()
            }
        }
    }

    /// H(t) by quadrature of the tail identity; independent of the closed
    /// forms in [`Self::h`].
    pub fn h_quadrature(&self, t: f64, rel_tol: f64) -> Result<f64> {
        Self::check_t(t, "h_quadrature")?;
        if t == 0.0 {
            return Ok(0.0);
        }
        let tail = |s: f64| self.tail(s).map(|p| p.value).unwrap_or(0.0);
        let f = |s: f64| s * tail(s);
        let mut total = 0.0;
        let mut lo = 0.0f64;
        for b in self.breakpoints() {
            if b >= t {
                break;
            }
            if b > lo {
                total += quad::adaptive_simpson(&f, lo, b, rel_tol * 0.1 * (b - lo) * f(0.5 * (lo + b)).max(1e-300));
                lo = b;
            }
        }
        if t > lo {
            if lo == 0.0 {
                total += quad::adaptive_simpson(&f, 0.0, t.min(1.0), rel_tol * 1e-3);
                lo = t.min(1.0);
            }
            if t > lo {
                total += quad::integrate_geometric(&f, lo, t, 2.0, rel_tol * 1e-2);
            }
        }
        Ok(2.0 * total - t * t * tail(t))
    }

    /// M(t) by quadrature of the tail identity plus a fitted power-law
    /// remainder; independent of the closed forms in [`Self::m`].
    pub fn m_quadrature(&self, t: f64, rel_tol: f64) -> Result<f64> {
        Self::check_t(t, "m_quadrature")?;
        // fail the same way m() does on infinite-mean laws
        match self {
            DistributionSpec::SymPareto { beta, .. } if *beta <= 1.0 => {
                return Err(Error::InfiniteMean { beta: *beta })
            }
            DistributionSpec::TailTable(tab) => {
                if let Some(b) = tab.fit_beta {
                    if b <= 1.0 {
                        return Err(Error::InfiniteMean { beta: b });
                    }
                }
            }
            DistributionSpec::Scaled { base, .. } => {
                if base.abs_mean().is_divergent() {
                    return Err(Error::InfiniteMean { beta: f64::NAN });
                }
            }
            _ => {}
        }
        let tail = |s: f64| self.tail(s).map(|p| p.value).unwrap_or(0.0);
        // cutoff: far enough out that the local power fit is the exact tail
        // for pareto/tables and the remainder is negligible for light tails
        let far = self
            .breakpoints()
            .last()
            .copied()
            .unwrap_or(1.0)
            .max(t)
            .max(1.0);
        let cutoff = far * 2f64.powi(40);
        let mut integral = 0.0;
        let t_eff = t.max(1e-300);
        let mut lo = t_eff;
        for b in self.breakpoints() {
            if b > lo && b < cutoff {
                integral += quad::integrate_geometric(&tail, lo, b, 2.0, rel_tol * 1e-2);
                lo = b;
            }
        }
        integral += quad::integrate_geometric(&tail, lo, cutoff, 2.0, rel_tol * 1e-2);
        // remainder from local power fit at the cutoff
        let p_cut = tail(cutoff);
        let remainder = if p_cut > 0.0 {
            let p_half = tail(cutoff * 0.5);
            let beta_loc = (p_half / p_cut).ln() / LN_2;
            if beta_loc > 1.0 {
                p_cut * cutoff / (beta_loc - 1.0)
            } else {
                return Err(Error::InfiniteMean { beta: beta_loc });
            }
        } else {
            0.0
        };
        Ok(t * tail(t) + integral + remainder)
    }

    /// Draw `count` i.i.d. samples from the caller's substream.
    pub fn sample(&self, stream: &mut Substream, count: usize) -> Vec<f64> {
        let mut out = vec![0.0; count];
        for v in out.iter_mut() {
            *v = self.sample_one(stream);
        }
        out
    }

    #[inline]
    pub fn sample_one(&self, stream: &mut Substream) -> f64 {
        match self {
            DistributionSpec::Rademacher => {
                if stream.uniform_open() < 0.5 {
                    -1.0
                } else {
                    1.0
                }
            }
            DistributionSpec::Gaussian { sigma } => sigma * stream.standard_normal(),
            DistributionSpec::SymPareto { beta, xmin } => {
                let mag = xmin * stream.uniform_open().powf(-1.0 / beta);
                if stream.uniform_open() < 0.5 {
                    -mag
                } else {
                    mag
                }
            }
            DistributionSpec::TailTable(tab) => {
                let mag = tab.quantile_abs(stream.uniform_open());
                if stream.uniform_open() < 0.5 {
                    -mag
                } else {
                    mag
                }
            }
            DistributionSpec::Scaled { base, c } => c * base.sample_one(stream),
        }
    }
}

#[inline]
pub(crate) fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Cached truncated moments on a geometric grid `t0 * ratio^k`.
#[derive(Debug, Clone)]
pub struct MomentCache {
    pub grid: Vec<f64>,
    pub h_vals: Vec<f64>,
    pub m_vals: Vec<f64>,
}

impl MomentCache {
    pub fn build(dist: &DistributionSpec, t0: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(t0 > 0.0 && ratio > 1.0 && count >= 2) {
            return Err(Error::Config("moment cache needs t0 > 0, ratio > 1, count >= 2".into()));
        }
        let mut grid = Vec::with_capacity(count);
        let mut t = t0;
        for _ in 0..count {
            grid.push(t);
            t *= ratio;
        }
        let h_vals: Result<Vec<f64>> = grid.iter().map(|&t| dist.h(t)).collect();
        let m_vals: Result<Vec<f64>> = grid.iter().map(|&t| dist.m(t)).collect();
        Ok(MomentCache { grid, h_vals: h_vals?, m_vals: m_vals? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logscale::E;

    #[test]
    fn feller_pruitt_closed_forms() {
        let fp = DistributionSpec::feller_pruitt();
        // tail(2) = 1/4 (oracle: \int_2^inf 2 x^-3 dx = t^-2)
        assert!((fp.tail(2.0).unwrap().value - 0.25).abs() < 1e-15);
        // H(e^2) = 4 = 2 L(e^2)
        assert!((fp.h((E * E).min(f64::MAX)).unwrap() - 4.0).abs() < 1e-12);
        // M(2) = 1, M(0) = E|X| = 2
        assert!((fp.m(2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((fp.m(0.0).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(fp.second_moment(), Moment::Divergent);
    }

    #[test]
    fn rademacher_closed_forms() {
        let r = DistributionSpec::Rademacher;
        assert_eq!(r.tail(0.5).unwrap().value, 1.0);
        assert_eq!(r.tail(1.0).unwrap().value, 0.0);
        assert_eq!(r.h(1.0).unwrap(), 1.0);
        assert_eq!(r.h(0.99).unwrap(), 0.0);
        assert_eq!(r.m(1.0).unwrap(), 0.0);
        assert_eq!(r.m(0.5).unwrap(), 1.0);
    }

    #[test]
    fn gaussian_basics() {
        let g = DistributionSpec::gaussian(1.0).unwrap();
        assert_eq!(g.tail(0.0).unwrap().value, 1.0);
        assert_eq!(g.h(0.0).unwrap(), 0.0);
        // H(t) -> sigma^2 and M(t) -> 0
        assert!((g.h(40.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(g.m(40.0).unwrap() < 1e-300);
        // M(0) = E|X| = sqrt(2/pi)
        assert!((g.m(0.0).unwrap() - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn any_dist_h_at_zero_is_zero() {
        for d in [
            DistributionSpec::Rademacher,
            DistributionSpec::gaussian(2.0).unwrap(),
            DistributionSpec::feller_pruitt(),
        ] {
            assert_eq!(d.h(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn h_rejects_bad_t() {
        let fp = DistributionSpec::feller_pruitt();
        assert!(fp.h(f64::NAN).is_err());
        assert!(fp.h(f64::INFINITY).is_err());
        assert!(fp.h(-1.0).is_err());
    }

    #[test]
    fn infinite_mean_error() {
        let d = DistributionSpec::sym_pareto(1.0, 1.0).unwrap();
        assert!(matches!(d.m(2.0), Err(Error::InfiniteMean { .. })));
        assert!(d.abs_mean().is_divergent());
    }

    #[test]
    fn quadrature_matches_closed_forms_feller_pruitt() {
        let fp = DistributionSpec::feller_pruitt();
        let mut t = 1.0f64;
        while t <= 1e12 {
            let hq = fp.h_quadrature(t, 1e-11).unwrap();
            let h = fp.h(t).unwrap();
            assert!((hq - h).abs() <= 1e-8 * h.max(1.0), "t={t} hq={hq} h={h}");
            let mq = fp.m_quadrature(t, 1e-11).unwrap();
            let m = fp.m(t).unwrap();
            assert!((mq - m).abs() <= 1e-8 * m.max(1e-12), "t={t} mq={mq} m={m}");
            t *= 10.0;
        }
    }

    #[test]
    fn quadrature_matches_closed_forms_gaussian() {
        let g = DistributionSpec::gaussian(1.5).unwrap();
        for t in [0.1, 1.0, 3.0, 10.0] {
            let hq = g.h_quadrature(t, 1e-11).unwrap();
            let h = g.h(t).unwrap();
            assert!((hq / h - 1.0).abs() < 1e-7, "t={t} hq={hq} h={h}");
            let mq = g.m_quadrature(t, 1e-11).unwrap();
            let m = g.m(t).unwrap();
            assert!((mq / m - 1.0).abs() < 1e-7, "t={t} mq={mq} m={m}");
        }
    }

    #[test]
    fn monotone_moments_on_grid() {
        for d in [
            DistributionSpec::Rademacher,
            DistributionSpec::gaussian(1.0).unwrap(),
            DistributionSpec::feller_pruitt(),
            DistributionSpec::sym_pareto(3.0, 0.5).unwrap(),
        ] {
            let cache = MomentCache::build(&d, 1e-3, 1.7, 60).unwrap();
            for w in cache.h_vals.windows(2) {
                assert!(w[1] >= w[0] - 1e-12);
            }
            for w in cache.m_vals.windows(2) {
                assert!(w[1] <= w[0] + 1e-12);
            }
            assert!(cache.h_vals.iter().all(|v| *v >= 0.0));
            assert!(cache.m_vals.iter().all(|v| *v >= 0.0));
            // M -> 0 along the grid
            assert!(cache.m_vals.last().unwrap() < &1e-6);
            // H approaches E X^2 when finite
            if let Moment::Finite(ex2) = d.second_moment() {
                assert!((cache.h_vals.last().unwrap() / ex2 - 1.0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn ln_forms_agree_with_linear_forms() {
        for d in [
            DistributionSpec::Rademacher,
            DistributionSpec::gaussian(0.7).unwrap(),
            DistributionSpec::feller_pruitt(),
            DistributionSpec::sym_pareto(1.5, 2.0).unwrap(),
            DistributionSpec::sym_pareto(3.0, 1.0).unwrap(),
        ] {
            for ln_t in [0.5f64, 2.0, 10.0, 50.0, 200.0] {
                let t = ln_t.exp();
                let (lt, _) = d.ln_tail(ln_t);
                let tv = d.tail(t).unwrap().value;
                if tv > 1e-290 {
                    assert!((lt - tv.ln()).abs() < 1e-8, "{} ln_tail {} vs {}", d.label(), lt, tv.ln());
                }
                let lh = d.ln_h(ln_t);
                let hv = d.h(t).unwrap();
                if hv > 1e-290 {
                    assert!((lh - hv.ln()).abs() < 1e-7, "{} ln_h {} vs {}", d.label(), lh, hv.ln());
                }
                if let Ok(mv) = d.m(t) {
                    let lm = d.ln_m(ln_t).unwrap();
                    if mv > 1e-290 {
                        assert!((lm - mv.ln()).abs() < 1e-7, "{} ln_m", d.label());
                    }
                }
            }
        }
    }

    #[test]
    fn deep_log_scale_tail_moments() {
        let fp = DistributionSpec::feller_pruitt();
        // ln tail = -2 ln t exactly, ln H = ln(2 ln t), at ln t = 1e300
        let (lt, _) = fp.ln_tail(1e300);
        assert_eq!(lt, -2e300);
        assert!((fp.ln_h(1e300) - (2e300f64).ln()).abs() < 1e-12);
        let g = DistributionSpec::gaussian(1.0).unwrap();
        assert_eq!(g.ln_tail(1e300).0, f64::NEG_INFINITY);
        assert_eq!(g.ln_h(1e300), 0.0);
    }

    #[test]
    fn tail_table_parse_interpolate_extrapolate() {
        let text = "# lil-tail-table v1\n1.0 0.5\n10.0 0.05\n100.0 0.005\n";
        let tab = TailTable::parse(text).unwrap();
        let d = DistributionSpec::TailTable(tab);
        // exact at nodes
        assert_eq!(d.tail(10.0).unwrap(), TailProb { value: 0.05, extrapolated: false });
        // log-log interpolation: exponent 1 between nodes
        let mid = d.tail((10.0f64 * 100.0).sqrt()).unwrap();
        assert!((mid.value - 0.05 / 10f64.sqrt()).abs() < 1e-12);
        assert!(!mid.extrapolated);
        // extrapolation beyond the table is flagged and follows the fit
        let far = d.tail(1000.0).unwrap();
        assert!(far.extrapolated);
        assert!((far.value - 0.0005).abs() < 1e-10);
        // below the first point: the atom-at-zero convention
        assert_eq!(d.tail(0.5).unwrap().value, 0.5);
    }

    #[test]
    fn tail_table_rejects_malformed() {
        assert!(TailTable::parse("1.0 0.5\n").is_err()); // no header
        assert!(TailTable::parse("# lil-tail-table v1\n1.0 0.5\n0.5 0.4\n").is_err()); // t not increasing
        assert!(TailTable::parse("# lil-tail-table v1\n1.0 0.5\n2.0 0.6\n").is_err()); // p not decreasing
        assert!(TailTable::parse("# lil-tail-table v1\n1.0 1.5\n").is_err()); // p > 1
        assert!(TailTable::parse("# lil-tail-table v1\n1.0 0.5\n").is_err()); // single positive point
        assert!(TailTable::parse("# lil-tail-table v1\n1.0 0.0\n").is_ok()); // degenerate at 0 is fine
    }

    #[test]
    fn degenerate_table_is_point_mass_at_zero() {
        let tab = TailTable::new(vec![(1e-9, 0.0)]).unwrap();
        let d = DistributionSpec::TailTable(tab);
        let mut s = Substream::new(1, 0);
        assert!(d.sample(&mut s, 100).iter().all(|&x| x == 0.0));
        assert_eq!(d.tail(1.0).unwrap().value, 0.0);
    }

    #[test]
    fn sampling_rademacher_values() {
        let d = DistributionSpec::Rademacher;
        let mut s = Substream::new(42, 0);
        let xs = d.sample(&mut s, 1000);
        assert!(xs.iter().all(|&x| x == 1.0 || x == -1.0));
    }

    #[test]
    fn sampling_feller_pruitt_ks_against_closed_tail() {
        // oracle: P(|X| > t) = t^-2; KS distance of |X| empirical CDF vs
        // 1 - t^-2 within 0.01 at 1e6 draws
        let d = DistributionSpec::feller_pruitt();
        let mut s = Substream::new(42, 1);
        let mut mags: Vec<f64> = d.sample(&mut s, 1_000_000).iter().map(|x| x.abs()).collect();
        mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = mags.len() as f64;
        let mut ks: f64 = 0.0;
        for (i, &x) in mags.iter().enumerate() {
            let cdf = 1.0 - x.powi(-2);
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            ks = ks.max((cdf - lo).abs()).max((cdf - hi).abs());
        }
        assert!(ks < 0.01, "ks = {ks}");
    }

    #[test]
    fn sampling_gaussian_mean_band() {
        let d = DistributionSpec::gaussian(1.0).unwrap();
        let mut s = Substream::new(7, 0);
        let xs = d.sample(&mut s, 1_000_000);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 4e-3, "mean = {mean}");
    }

    #[test]
    fn scaled_law_transforms_moments() {
        let d = DistributionSpec::scaled(DistributionSpec::Rademacher, 2.0).unwrap();
        assert_eq!(d.tail(1.5).unwrap().value, 1.0);
        assert_eq!(d.tail(2.0).unwrap().value, 0.0);
        assert_eq!(d.h(2.0).unwrap(), 4.0);
        assert_eq!(d.h(1.9).unwrap(), 0.0);
        assert_eq!(d.m(1.0).unwrap(), 2.0);
        assert_eq!(d.second_moment(), Moment::Finite(4.0));
        let mut s = Substream::new(9, 0);
        assert!(d.sample(&mut s, 64).iter().all(|&x| x.abs() == 2.0));
    }

    #[test]
    fn tail_table_sampling_matches_tail() {
        let tab = TailTable::new(vec![(1.0, 0.8), (4.0, 0.2), (16.0, 0.05)]).unwrap();
        let d = DistributionSpec::TailTable(tab);
        let mut s = Substream::new(3, 0);
        let xs = d.sample(&mut s, 200_000);
        // empirical tail at a few probes vs the interpolant
        for t in [0.5, 1.0, 2.0, 4.0, 8.0, 32.0] {
            let emp = xs.iter().filter(|x| x.abs() > t).count() as f64 / xs.len() as f64;
            let want = d.tail(t).unwrap().value;
            assert!((emp - want).abs() < 0.01, "t={t} emp={emp} want={want}");
        }
        // symmetric signs among the non-atom draws
        let nonzero: Vec<f64> = xs.iter().cloned().filter(|x| *x != 0.0).collect();
        let pos = nonzero.iter().filter(|x| **x > 0.0).count() as f64 / nonzero.len() as f64;
        assert!((pos - 0.5).abs() < 0.01);
    }
}
