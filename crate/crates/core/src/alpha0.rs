//! Cluster-set radius `α₀` for normalized sums `S_n/c_n`.
//!
//! For a regular sequence `c_n` with `Σ P(|X| ≥ c_n) < ∞`,
//!
//! ```text
//! α₀ = sup{ α ≥ 0 : Σ n⁻¹ exp(-α² c_n² / (2 n σ_n²)) = ∞ },
//! σ_n² = H(δ c_n), δ > 0,
//! ```
//!
//! and the cluster set of `{S_n/c_n}` is `[-α₀, α₀]`.  When
//! `a = liminf c_n/γ_n > 0` the truncation level may be replaced by any
//! `d_n ≤ c_n` with `log(c_n/d_n)/LLn → 0`, and `α₀ ≤ 1/a`; a matching
//! lower bound is `1/b` with `b = limsup c_n/γ_n`.
//!
//! Classification of the defining series at a probe `α` works through the
//! exponent-to-`LLn` ratio `ρ(n) = α² c_n²/(2 n σ_n² LLn)`: the terms are
//! `n⁻¹ (Ln)^{-ρ(n)}`, so a settling `ρ` decides divergence by its limit
//! against 1 (ties toward divergence, `α₀` being a supremum over the
//! divergent set).  When `ρ` oscillates, the dyadic block evidence itself is
//! classified.  Block sums are always computed and reported.

use serde::Serialize;

use crate::distmodel::DistributionSpec;
use crate::error::{Error, Result};
use crate::grid::AsymptoticGrid;
use crate::logscale::{l_of_ln, l_raw};
use crate::seq::NormSeq;
use crate::series::{self, SeriesVerdict};

const LN_2: f64 = std::f64::consts::LN_2;

/// Truncation policy for `σ_n²`.
#[derive(Clone, Debug)]
pub enum SigmaPolicy {
    /// `σ_n² = H(δ c_n)`, `δ > 0`.
    Delta(f64),
    /// `σ_n² = H(d_n)` for an explicit `d_n ≤ c_n` satisfying the
    /// `log(c_n/d_n)/LLn → 0` trend.
    Truncation(NormSeq),
    /// `σ_n² ≡ σ²` — a test hook for closed-form oracles.
    Constant(f64),
}

impl SigmaPolicy {
    pub fn label(&self) -> String {
        match self {
            SigmaPolicy::Delta(d) => format!("H(delta*c_n), delta={d}"),
            SigmaPolicy::Truncation(d) => format!("H(d_n), d={}", d.label()),
            SigmaPolicy::Constant(s2) => format!("constant sigma^2={s2}"),
        }
    }

    fn validate(&self, c: &NormSeq, dist: &DistributionSpec) -> Result<()> {
        match self {
            SigmaPolicy::Delta(d) => {
                if !(*d > 0.0 && d.is_finite()) {
                    return Err(Error::Domain {
                        op: "sigma_policy",
                        message: "delta must be > 0",
                        value: *d,
                    });
                }
                Ok(())
            }
            SigmaPolicy::Constant(s2) => {
                if !(*s2 > 0.0 && s2.is_finite()) {
                    return Err(Error::Domain {
                        op: "sigma_policy",
                        message: "sigma^2 must be > 0",
                        value: *s2,
                    });
                }
                Ok(())
            }
            SigmaPolicy::Truncation(d) => {
                let _ = dist;
                validate_truncation_trend(c, d)
            }
        }
    }
}

/// Check `d_n ≤ c_n` and the decreasing trend of `log(c_n/d_n)/LLn` on
/// dyadic `n`; a violation is reported with the offending `n`.  The trend
/// is judged past the iterated-log transient (n >= 2^8).
pub fn validate_truncation_trend(c: &NormSeq, d: &NormSeq) -> Result<()> {
    let mut vs: Vec<(u64, f64)> = Vec::new();
    for j in 2..=52u32 {
        let n = 2u64.pow(j);
        let u = (n as f64).ln();
        let (ln_c, ln_d) = (c.ln_c(u)?, d.ln_c(u)?);
        if ln_d > ln_c + 1e-12 {
            return Err(Error::TruncationTrend { n, value: (ln_c - ln_d).exp() });
        }
        if j >= 8 {
            vs.push((n, (ln_c - ln_d) / l_raw(l_of_ln(u))));
        }
    }
    for w in vs.windows(2) {
        if w[1].1 > w[0].1 * 1.05 + 1e-9 {
            return Err(Error::TruncationTrend { n: w[1].0, value: w[1].1 });
        }
    }
    let first = vs[0].1;
    let last = vs[vs.len() - 1].1;
    if !(last <= 0.9 * first || last < 0.05) {
        return Err(Error::TruncationTrend { n: vs[vs.len() - 1].0, value: last });
    }
    Ok(())
}

/// `σ_n²` under the policy.
pub fn sigma_sq(
    dist: &DistributionSpec,
    c: &NormSeq,
    policy: &SigmaPolicy,
    n: u64,
) -> Result<f64> {
    policy.validate(c, dist)?;
    match policy {
        SigmaPolicy::Delta(d) => dist.h(d * c.c(n)?),
        SigmaPolicy::Truncation(dseq) => dist.h(dseq.c(n)?),
        SigmaPolicy::Constant(s2) => Ok(*s2),
    }
}

fn ln_sigma_sq(
    dist: &DistributionSpec,
    c: &NormSeq,
    policy: &SigmaPolicy,
    u: f64,
) -> Result<f64> {
    Ok(match policy {
        SigmaPolicy::Delta(d) => dist.ln_h(d.ln() + c.ln_c(u)?),
        SigmaPolicy::Truncation(dseq) => dist.ln_h(dseq.ln_c(u)?),
        SigmaPolicy::Constant(s2) => s2.ln(),
    })
}

/// Verdicts for the regularity hypotheses on `c_n`.
#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    /// `c_n/√n` nondecreasing on dyadic n (exact check).
    pub ratio_nondecreasing: bool,
    /// `c_n/√n → ∞` (trailing growth still active).
    pub ratio_unbounded: bool,
    pub monotonicity_witness: Option<u64>,
    /// quasi-monotonicity `c_n/c_m ≤ (1+ε)(n/m)` per probed ε.
    pub growth_checks: Vec<GrowthCheck>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthCheck {
    pub epsilon: f64,
    pub pass: bool,
    /// smallest dyadic m from which no sampled violation occurs.
    pub m_eps: Option<u64>,
    pub witness: Option<(u64, u64)>,
}

impl RegularityReport {
    pub fn pass(&self) -> bool {
        self.ratio_nondecreasing
            && self.ratio_unbounded
            && self.growth_checks.iter().any(|g| g.pass)
    }
}

/// Check hypotheses `c_n/√n ↗ ∞` and `c_n/c_m ≤ (1+ε)(n/m)` on dyadic
/// samples up to `nmax`.
pub fn check_c_regularity(c: &NormSeq, nmax: u64) -> Result<RegularityReport> {
    if nmax < 1000 {
        return Err(Error::Config("check_c_regularity needs nmax >= 1000".into()));
    }
    let j_max = 63 - nmax.leading_zeros();
    let mut qs: Vec<(u64, f64)> = Vec::new();
    for j in 0..=j_max {
        let n = 1u64 << j;
        let q = c.c(n)? / (n as f64).sqrt();
        qs.push((n, q));
    }
    let mut nondecreasing = true;
    let mut witness = None;
    for w in qs.windows(2) {
        if w[1].1 < w[0].1 * (1.0 - 1e-12) {
            nondecreasing = false;
            witness = Some(w[1].0);
            break;
        }
    }
    // "→ ∞": the trailing half must still be growing measurably
    let mid_q = qs[qs.len() / 2].1;
    let last_q = qs[qs.len() - 1].1;
    let unbounded = nondecreasing && last_q > mid_q * 1.01;

    let mut growth_checks = Vec::new();
    for eps in [0.1, 0.01] {
        let mut worst_bad: Option<(u64, u64)> = None;
        let mut m_eps: Option<u64> = None;
        // for each dyadic m, test all dyadic n > m
        for jm in 0..j_max {
            let m = 1u64 << jm;
            let cm = c.c(m)?;
            let mut ok = true;
            for jn in (jm + 1)..=j_max {
                let n = 1u64 << jn;
                let cn = c.c(n)?;
                if cn / cm > (1.0 + eps) * (n as f64 / m as f64) * (1.0 + 1e-12) {
                    ok = false;
                    worst_bad = Some((m, n));
                    break;
                }
            }
            if ok && m_eps.is_none() {
                m_eps = Some(m);
            }
            if !ok {
                m_eps = None;
            }
        }
        growth_checks.push(GrowthCheck {
            epsilon: eps,
            pass: m_eps.is_some(),
            m_eps,
            witness: if m_eps.is_some() { None } else { worst_bad },
        });
    }
    Ok(RegularityReport {
        ratio_nondecreasing: nondecreasing,
        ratio_unbounded: unbounded,
        monotonicity_witness: witness,
        growth_checks,
    })
}

/// Finite-range liminf/limsup proxies for `c_n/γ_n` and the induced
/// `[1/b, 1/a]` band.
#[derive(Debug, Clone, Serialize)]
pub struct RatioBounds {
    pub a: f64,
    pub b: f64,
    /// `1/b` (lower bound for the limsup).
    pub lower: f64,
    /// `1/a`, or 0 when `c/γ → ∞` (the stability regime).
    pub upper: f64,
    pub upper_zero_flag: bool,
    pub trend: RatioTrend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioTrend {
    Settling,
    Oscillating,
    Increasing,
}

/// `a = min`, `b = max` of `c_n/γ_n` over the trailing window of the deep
/// diagnostic grid.
pub fn ratio_bounds(dist: &DistributionSpec, c: &NormSeq) -> Result<RatioBounds> {
    let k = crate::klass::KlassEval::new(dist.clone())?;
    let grid = AsymptoticGrid::default_deep();
    let mut ratios: Vec<f64> = Vec::new();
    for &u in grid.trailing(0.25) {
        // Δ = (k_c - k_γ)·u + (r_c - r_γ): coefficient arithmetic keeps the
        // u-scale parts from swamping the slowly varying remainder
        let (kc, rc) = match c.ln_c_split(u) {
            Ok(v) => v,
            // explicit tables do not extend to the diagnostic depth; fall
            // back to their own range below
            Err(_) => break,
        };
        let (kg, rg) = k.ln_gamma_split(u)?;
        let delta = (kc - kg) * u + (rc - rg);
        ratios.push(if delta > 700.0 {
            f64::INFINITY
        } else if delta < -700.0 {
            0.0
        } else {
            delta.exp()
        });
    }
    if ratios.is_empty() {
        // table sequences: dyadic n over the table's own range
        if let NormSeq::Table { ns, .. } = c {
            let n_hi = *ns.last().unwrap();
            let mut n = *ns.first().unwrap();
            while n <= n_hi {
                ratios.push(c.c(n)? / k.gamma_n(n)?);
                n = n.saturating_mul(2);
            }
        }
    }
    if ratios.len() < 4 {
        return Err(Error::Config("ratio_bounds needs an evaluable window".into()));
    }
    let a = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let b = ratios.iter().cloned().fold(0.0f64, f64::max);
    let first = ratios[0];
    let last = ratios[ratios.len() - 1];
    let changes = ratios
        .windows(2)
        .filter(|w| (w[1] - w[0]).abs() > 1e-9 * w[0].abs())
        .map(|w| (w[1] > w[0]) as i8 * 2 - 1)
        .collect::<Vec<i8>>()
        .windows(2)
        .filter(|p| p[0] != p[1])
        .count();
    let trend = if changes > 2 {
        RatioTrend::Oscillating
    } else if last > 2.0 * first {
        RatioTrend::Increasing
    } else {
        RatioTrend::Settling
    };
    let upper_zero_flag = trend == RatioTrend::Increasing && last > 10.0;
    Ok(RatioBounds {
        a,
        b,
        lower: 1.0 / b,
        upper: if upper_zero_flag { 0.0 } else { 1.0 / a },
        upper_zero_flag,
        trend,
    })
}

/// One probed α with its classification evidence.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaProbe {
    pub alpha: f64,
    pub verdict: SeriesVerdict,
    pub route: &'static str,
    /// fitted limit of `ρ(n) = exponent/LLn`, when the ratio settles.
    pub rho_limit: Option<f64>,
    /// dyadic block sums `B_j(α)`, `n ∈ [2^j, 2^{j+1})`.
    pub blocks: Vec<f64>,
}

/// Options for [`alpha0_estimate`].
#[derive(Debug, Clone)]
pub struct Alpha0Options {
    /// dyadic block range for the reported evidence (default 10^16).
    pub nmax: u64,
    /// bisection stops at this bracket width.
    pub bracket_width: f64,
    /// expansion cap before declaring `α₀ = ∞`.
    pub alpha_cap: f64,
}

impl Default for Alpha0Options {
    fn default() -> Self {
        Alpha0Options { nmax: 10u64.pow(16), bracket_width: 0.01, alpha_cap: 64.0 }
    }
}

/// Bracketed estimate of `α₀` with policy, bounds and per-probe evidence.
#[derive(Debug, Clone, Serialize)]
pub struct Alpha0Report {
    pub dist: String,
    pub sequence: String,
    pub sigma_policy: String,
    /// `[lo, hi]` once the divergence/convergence boundary is bracketed;
    /// `None` when evidence was inconclusive everywhere.
    pub bracket: Option<(f64, f64)>,
    /// set when every probe up to the cap diverges.
    pub infinite: bool,
    pub ratio_bounds: RatioBounds,
    pub regularity: RegularityReport,
    /// verdict for the prerequisite series `Σ P(|X| ≥ c_n)`.
    pub series_212: SeriesVerdict,
    pub probes: Vec<AlphaProbe>,
    pub inconclusive_probes: usize,
}

fn classify_alpha(
    dist: &DistributionSpec,
    c: &NormSeq,
    policy: &SigmaPolicy,
    alpha: f64,
    grid: &AsymptoticGrid,
    nmax: u64,
) -> Result<AlphaProbe> {
    // exponent(n) = α² c_n²/(2 n σ_n²); ρ = exponent/LLn.  With the split
    // ln c = k·u + r the combination 2 ln c - u is (2k-1)·u + 2r, exact in
    // the coefficient for the k = 1/2 sequences that matter here.
    let ln_alpha2 = 2.0 * alpha.max(1e-300).ln();
    let ln_exponent = |u: f64| -> Result<f64> {
        let (k, r) = c.ln_c_split(u)?;
        Ok(ln_alpha2 + (2.0 * k - 1.0) * u + 2.0 * r - LN_2 - ln_sigma_sq(dist, c, policy, u)?)
    };
    // dyadic block evidence
    let j_max = 63 - nmax.leading_zeros();
    let mut blocks = Vec::with_capacity(j_max as usize + 1);
    for j in 0..=j_max {
        blocks.push(dyadic_block(&ln_exponent, j)?);
    }
    if alpha == 0.0 {
        // Σ 1/n
        return Ok(AlphaProbe {
            alpha,
            verdict: SeriesVerdict::Infinite,
            route: "alpha-zero",
            rho_limit: Some(0.0),
            blocks,
        });
    }
    // ρ over the deep grid, on the arithmetic LL axis
    let mut xs = Vec::with_capacity(grid.ln_x.len());
    let mut rho = Vec::with_capacity(grid.ln_x.len());
    for &u in &grid.ln_x {
        let lln = l_raw(l_of_ln(u));
        let le = ln_exponent(u)?;
        xs.push(lln);
        rho.push(if le - lln.ln() > 700.0 { f64::INFINITY } else { (le - lln.ln()).exp() });
    }
    if let Some(fit) = series::fit_limit(&xs, &rho) {
        let margin = (3.0 * fit.rms_residual).max(1e-4);
        let verdict = if fit.limit > 1.0 + margin {
            SeriesVerdict::Finite
        } else {
            // ties toward divergence: α₀ is a supremum over the divergent set
            SeriesVerdict::Infinite
        };
        return Ok(AlphaProbe { alpha, verdict, route: "rho-limit", rho_limit: Some(fit.limit), blocks });
    }
    // oscillating ρ: classify extended exponent-dyadic block evidence;
    // the density of n^{-1} exp(-exponent) is exp(-exponent) itself
    let ln_density = |u: f64| -> f64 {
        let le = ln_exponent(u).unwrap_or(f64::INFINITY);
        if le > 230.0 {
            f64::NEG_INFINITY
        } else {
            -le.exp()
        }
    };
    let deep_blocks = series::exponent_dyadic_blocks(&ln_density, 995);
    let cls = series::classify_blocks(&deep_blocks, 0);
    Ok(AlphaProbe { alpha, verdict: cls.verdict, route: cls.route, rho_limit: None, blocks })
}

/// `B_j(α) = Σ_{n ∈ [2^j, 2^{j+1})} n⁻¹ exp(-exponent(n))`, summed exactly
/// for small j and integrated beyond.
fn dyadic_block(ln_exponent: &dyn Fn(f64) -> Result<f64>, j: u32) -> Result<f64> {
    let term = |u: f64| -> Result<f64> {
        let le = ln_exponent(u)?;
        let e = if le > 230.0 { return Ok(0.0) } else { le.exp() };
        Ok((-e).exp())
    };
    if j <= 16 {
        let mut s = 0.0;
        for n in (1u64 << j)..(1u64 << (j + 1)) {
            s += term((n as f64).ln())? / n as f64;
        }
        return Ok(s);
    }
    // \int_{2^j}^{2^{j+1}} exp(-exponent(x)) dx/x on 32 Simpson panels in ln x
    let u_lo = (j as f64) * LN_2;
    let u_hi = (j as f64 + 1.0) * LN_2;
    let panels = 32;
    let h = (u_hi - u_lo) / panels as f64;
    let mut s = 0.0;
    for k in 0..panels {
        let a = u_lo + k as f64 * h;
        let b = a + h;
        let m = 0.5 * (a + b);
        s += (b - a) / 6.0 * (term(a)? + 4.0 * term(m)? + term(b)?);
    }
    Ok(s)
}

/// Bracket `α₀` by bisection over probe classifications.
pub fn alpha0_estimate(
    dist: &DistributionSpec,
    c: &NormSeq,
    policy: &SigmaPolicy,
    options: &Alpha0Options,
) -> Result<Alpha0Report> {
    policy.validate(c, dist)?;
    let regularity = check_c_regularity(c, options.nmax.max(1000))?;
    if !regularity.ratio_nondecreasing {
        return Err(Error::Config(format!(
            "c_n/sqrt(n) not nondecreasing (witness n = {:?})",
            regularity.monotonicity_witness
        )));
    }
    // prerequisite: Σ P(|X| ≥ c_n) must converge
    let ln_tail_density = |u: f64| match c.ln_c_split(u) {
        Ok((k, r)) => dist.ln_tail_shifted(k, r, u),
        Err(_) => f64::NEG_INFINITY,
    };
    let tail_blocks = series::exponent_dyadic_blocks(&ln_tail_density, 995);
    let series_212 = series::classify_blocks(&tail_blocks, 0).verdict;
    if series_212 == SeriesVerdict::Infinite {
        return Err(Error::Config(
            "prerequisite series sum P(|X| >= c_n) diverges; the cluster radius is not identified"
                .into(),
        ));
    }
    let rb = ratio_bounds(dist, c)?;
    let grid = AsymptoticGrid::default_deep();

    let mut probes: Vec<AlphaProbe> = Vec::new();
    let classify = |alpha: f64, probes: &mut Vec<AlphaProbe>| -> Result<SeriesVerdict> {
        let p = classify_alpha(dist, c, policy, alpha, &grid, options.nmax)?;
        let v = p.verdict;
        probes.push(p);
        Ok(v)
    };

    // expansion: seed the upper probe from the ratio bound when available
    let mut lo = 0.0f64;
    let mut hi = if rb.upper > 0.0 && rb.upper.is_finite() { 2.0 * rb.upper } else { 2.0 };
    let mut hi_verdict = classify(hi, &mut probes)?;
    while hi_verdict != SeriesVerdict::Finite {
        if hi_verdict == SeriesVerdict::Infinite {
            lo = hi;
        }
        hi *= 2.0;
        if hi > options.alpha_cap {
            let inconclusive_probes =
                probes.iter().filter(|p| p.verdict == SeriesVerdict::Inconclusive).count();
            let all_inconclusive = inconclusive_probes == probes.len();
            return Ok(Alpha0Report {
                dist: dist.label(),
                sequence: c.label(),
                sigma_policy: policy.label(),
                bracket: None,
                infinite: !all_inconclusive,
                ratio_bounds: rb,
                regularity,
                series_212,
                probes,
                inconclusive_probes,
            });
        }
        hi_verdict = classify(hi, &mut probes)?;
    }
    // bisection; inconclusive ties break toward "divergent"
    while hi - lo > options.bracket_width {
        let mid = 0.5 * (lo + hi);
        match classify(mid, &mut probes)? {
            SeriesVerdict::Finite => hi = mid,
            _ => lo = mid,
        }
    }
    let inconclusive_probes =
        probes.iter().filter(|p| p.verdict == SeriesVerdict::Inconclusive).count();
    let all_inconclusive = inconclusive_probes == probes.len();
    Ok(Alpha0Report {
        dist: dist.label(),
        sequence: c.label(),
        sigma_policy: policy.label(),
        bracket: if all_inconclusive { None } else { Some((lo, hi)) },
        infinite: false,
        ratio_bounds: rb,
        regularity,
        series_212,
        probes,
        inconclusive_probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::klass::KlassEval;
    use crate::normalizer::{Normalizer, SlowFunction};
    use std::sync::Arc;

    fn psi_seq(h: SlowFunction) -> NormSeq {
        NormSeq::psi(Normalizer::new(h).unwrap())
    }

    /// c_n = sqrt(2 n LLn)
    fn loglog_seq() -> NormSeq {
        psi_seq(SlowFunction::loglog_power(1.0).unwrap())
    }

    #[test]
    fn regularity_pass_and_fail() {
        // c = sqrt(2n LLn): both hypotheses hold
        let rep = check_c_regularity(&loglog_seq(), 10u64.pow(16)).unwrap();
        assert!(rep.ratio_nondecreasing && rep.ratio_unbounded, "{rep:?}");
        assert!(rep.growth_checks.iter().all(|g| g.pass));
        // c = n: passes with equality in the quasi-monotonicity bound
        let lin = NormSeq::table((0..=54).map(|j| (1u64 << j, (1u64 << j) as f64)).collect())
            .unwrap();
        let rep = check_c_regularity(&lin, 10u64.pow(16)).unwrap();
        assert!(rep.ratio_nondecreasing && rep.ratio_unbounded);
        assert!(rep.growth_checks.iter().all(|g| g.pass), "{rep:?}");
        // c = sqrt(n): ratio constant, fails the "→ ∞" part
        let sqrt = NormSeq::table(
            (0..=54).map(|j| (1u64 << j, ((1u64 << j) as f64).sqrt())).collect(),
        )
        .unwrap();
        let rep = check_c_regularity(&sqrt, 10u64.pow(16)).unwrap();
        assert!(rep.ratio_nondecreasing);
        assert!(!rep.ratio_unbounded);
    }

    #[test]
    fn sigma_policy_values() {
        // gaussian, δ = 1, large n: σ_n² → 1
        let dist = DistributionSpec::gaussian(1.0).unwrap();
        let c = loglog_seq();
        let s2 = sigma_sq(&dist, &c, &SigmaPolicy::Delta(1.0), 1u64 << 40).unwrap();
        assert!((s2 - 1.0).abs() < 1e-12);
        // feller-pruitt with c ~ sqrt(2 n Ln LLn): σ_n² = 2 L(c_n) ≈ Ln
        let fp = DistributionSpec::feller_pruitt();
        let c2 = psi_seq(SlowFunction::scaled_phi_ll(SlowFunction::log_power(1.0).unwrap(), 1.0).unwrap());
        let n = 1u64 << 40;
        let s2 = sigma_sq(&fp, &c2, &SigmaPolicy::Delta(1.0), n).unwrap();
        let want = 2.0 * c2.c(n).unwrap().ln();
        assert!((s2 / want - 1.0).abs() < 1e-9);
        assert!((s2 / (n as f64).ln() - 1.0).abs() < 0.2, "σ² ≈ Ln up to lower order");
    }

    #[test]
    fn truncation_trend_check() {
        let c = loglog_seq();
        // d_n = c_n/(Ln)^{1/LLn}: log ratio / LLn = 1/LLn → 0: passes
        let d = NormSeq::table(
            (2..=52)
                .map(|j| {
                    let n = 1u64 << j;
                    let u = (n as f64).ln();
                    let lln = l_raw(u);
                    let dn = c.c(n).unwrap() / u.powf(1.0 / lln);
                    (n, dn)
                })
                .collect(),
        )
        .unwrap();
        validate_truncation_trend(&c, &d).unwrap();
        // d_n > c_n: rejected with the offending n
        let bad = NormSeq::scaled(c.clone(), 2.0).unwrap();
        let err = validate_truncation_trend(&c, &bad).unwrap_err();
        assert!(matches!(err, Error::TruncationTrend { .. }));
    }

    #[test]
    fn oracle_constant_sigma_brackets_one() {
        // σ_n² ≡ σ², c = σ sqrt(2n LLn): exponent = α² LLn exactly, so the
        // series is Σ n⁻¹ (Ln)^{-α²} and α₀ = 1 by the integral test
        let dist = DistributionSpec::gaussian(1.0).unwrap();
        let c = loglog_seq();
        let rep = alpha0_estimate(&dist, &c, &SigmaPolicy::Constant(1.0), &Alpha0Options::default())
            .unwrap();
        let (lo, hi) = rep.bracket.expect("bracket");
        assert!(lo <= 1.0 && 1.0 <= hi, "bracket = [{lo}, {hi}]");
        assert!(hi - lo <= 0.02, "width = {}", hi - lo);
        assert!(!rep.infinite);
    }

    #[test]
    fn under_growing_sequence_gives_infinite_alpha0() {
        // c_n = n^{1/2} (LLn)^{1/4}: exponent = o(LLn), divergent for every α
        let dist = DistributionSpec::gaussian(1.0).unwrap();
        let c = NormSeq::scaled(
            psi_seq(SlowFunction::loglog_power(0.5).unwrap()),
            0.5f64.sqrt(),
        )
        .unwrap();
        let rep =
            alpha0_estimate(&dist, &c, &SigmaPolicy::Delta(1.0), &Alpha0Options::default()).unwrap();
        assert!(rep.infinite, "probes: {:?}", rep.probes.iter().map(|p| (p.alpha, p.verdict, p.route)).collect::<Vec<_>>());
        assert!(rep.bracket.is_none());
    }

    #[test]
    fn fast_growing_sequence_gives_zero_alpha0() {
        // c_n = sqrt(n) Ln: exponent ≍ (Ln)²/2σ² ≫ LLn, convergent for all α
        let dist = DistributionSpec::gaussian(1.0).unwrap();
        let c = NormSeq::scaled(
            psi_seq(SlowFunction::log_power(2.0).unwrap()),
            0.5f64.sqrt(),
        )
        .unwrap();
        let rep =
            alpha0_estimate(&dist, &c, &SigmaPolicy::Delta(1.0), &Alpha0Options::default()).unwrap();
        let (lo, hi) = rep.bracket.expect("bracket");
        assert!(lo == 0.0 && hi <= 0.01 + 1e-12, "bracket = [{lo}, {hi}]");
    }

    #[test]
    fn rademacher_gamma_brackets_one() {
        // the two-sided Klass LIL value: c = γ on rademacher
        let dist = DistributionSpec::Rademacher;
        let k = Arc::new(KlassEval::new(dist.clone()).unwrap());
        let c = NormSeq::gamma(k);
        let rep =
            alpha0_estimate(&dist, &c, &SigmaPolicy::Delta(1.0), &Alpha0Options::default()).unwrap();
        let (lo, hi) = rep.bracket.expect("bracket");
        assert!(lo <= 1.0 && 1.0 <= hi, "bracket = [{lo}, {hi}]");
        assert!(hi - lo <= 0.02);
        // ratio bounds must reproduce [1, 1]
        assert!((rep.ratio_bounds.lower - 1.0).abs() < 1e-6, "{:?}", rep.ratio_bounds);
        assert!((rep.ratio_bounds.upper - 1.0).abs() < 1e-6);
    }

    #[test]
    fn ratio_bounds_scaled_gamma() {
        let dist = DistributionSpec::Rademacher;
        let k = Arc::new(KlassEval::new(dist.clone()).unwrap());
        let c = NormSeq::scaled(NormSeq::gamma(k), 2.0).unwrap();
        let rb = ratio_bounds(&dist, &c).unwrap();
        assert!((rb.lower - 0.5).abs() < 1e-6 && (rb.upper - 0.5).abs() < 1e-6);
    }

    #[test]
    fn ratio_bounds_stability_regime_flags_zero() {
        // c = sqrt(n) Ln on a finite-variance law: c/γ → ∞
        let dist = DistributionSpec::gaussian(1.0).unwrap();
        let c = NormSeq::scaled(
            psi_seq(SlowFunction::log_power(2.0).unwrap()),
            0.5f64.sqrt(),
        )
        .unwrap();
        let rb = ratio_bounds(&dist, &c).unwrap();
        assert!(rb.upper_zero_flag);
        assert_eq!(rb.upper, 0.0);
    }

    #[test]
    fn alpha0_monotone_in_scaled_sequence() {
        // pointwise-larger c shrinks α₀: compare c and 1.5 c
        let dist = DistributionSpec::gaussian(1.0).unwrap();
        let c = loglog_seq();
        let bigger = NormSeq::scaled(c.clone(), 1.5).unwrap();
        let r1 = alpha0_estimate(&dist, &c, &SigmaPolicy::Constant(1.0), &Alpha0Options::default())
            .unwrap();
        let r2 =
            alpha0_estimate(&dist, &bigger, &SigmaPolicy::Constant(1.0), &Alpha0Options::default())
                .unwrap();
        let mid = |b: (f64, f64)| 0.5 * (b.0 + b.1);
        assert!(mid(r2.bracket.unwrap()) < mid(r1.bracket.unwrap()));
    }

    #[test]
    fn prerequisite_series_must_converge() {
        // feller-pruitt with c too small: Σ P(|X| ≥ c_n) = ∞ is rejected
        let dist = DistributionSpec::feller_pruitt();
        let c = loglog_seq(); // tail(c_n) = 1/(2n LLn): divergent series
        let err =
            alpha0_estimate(&dist, &c, &SigmaPolicy::Delta(1.0), &Alpha0Options::default());
        assert!(err.is_err());
    }
}
