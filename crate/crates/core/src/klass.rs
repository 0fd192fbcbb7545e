//! The Klass functionals.
//!
//! For a law with `0 < E|X| < ∞`,
//!
//! ```text
//! G(t) = t^2 / (H(t) + t M(t))
//! ```
//!
//! is continuous and increasing with inverse `K`, and the universal
//! normalizing sequence is `γ_n = √2 · K(n/LLn) · LLn`.
//!
//! `K` is obtained by bracket expansion plus bisection on the log-t axis;
//! G has no usable derivative for table laws, and 60 bisection steps pin the
//! bracket to ~1e-18 relative width.  A geometric grid of G values (ratio
//! 1.05) is built eagerly so repeated `γ_n` queries start from a two-point
//! bracket instead of a cold search.

use crate::distmodel::{log_sum_exp, DistributionSpec};
use crate::error::{Error, Result};
use crate::logscale::{l_of_ln, l_raw, ll_raw};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Cached G evaluations plus inversion state for one law.
#[derive(Debug, Clone)]
pub struct KlassEval {
    dist: DistributionSpec,
    grid_t: Vec<f64>,
    grid_g: Vec<f64>,
    rel_tol: f64,
}

impl KlassEval {
    /// Build with the default grid `t ∈ [1e-6, 1e9]` (ratio 1.05) and
    /// inversion tolerance 1e-10.
    pub fn new(dist: DistributionSpec) -> Result<Self> {
        Self::with_options(dist, 1e-6, 1e9, 1.05, 1e-10)
    }

    pub fn with_options(
        dist: DistributionSpec,
        t_lo: f64,
        t_hi: f64,
        ratio: f64,
        rel_tol: f64,
    ) -> Result<Self> {
        if !(t_lo > 0.0 && t_hi > t_lo && ratio > 1.0 && rel_tol > 0.0) {
            return Err(Error::Config("invalid KlassEval grid options".into()));
        }
        if dist.abs_mean().is_divergent() {
            return Err(Error::InfiniteMean { beta: f64::NAN });
        }
        let mut eval = KlassEval { dist, grid_t: Vec::new(), grid_g: Vec::new(), rel_tol };
        let mut t = t_lo;
        while t <= t_hi {
            let g = eval.g(t)?;
            eval.grid_t.push(t);
            eval.grid_g.push(g);
            t *= ratio;
        }
        Ok(eval)
    }

    pub fn dist(&self) -> &DistributionSpec {
        &self.dist
    }

    /// G(t) = t^2 / (H(t) + t M(t)).
    pub fn g(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain { op: "G", message: "t must be positive and finite", value: t });
        }
        let denom = self.dist.h(t)? + t * self.dist.m(t)?;
        if denom <= 0.0 {
            return Err(Error::DegenerateLaw { t });
        }
        Ok(t * t / denom)
    }

    /// `ln G` with the argument given as `ln t`; reaches arguments far
    /// beyond `f64::MAX`.
    pub fn ln_g(&self, ln_t: f64) -> Result<f64> {
        let ln_h = self.dist.ln_h(ln_t);
        let ln_tm = ln_t + self.dist.ln_m(ln_t)?;
        let ln_denom = log_sum_exp(ln_h, ln_tm);
        if ln_denom == f64::NEG_INFINITY {
            return Err(Error::DegenerateLaw { t: ln_t.exp() });
        }
        Ok(2.0 * ln_t - ln_denom)
    }

    /// K(x): the unique `t` with `G(t) = x`.
    pub fn k(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::Domain { op: "K", message: "x must be positive and finite", value: x });
        }
        let (mut lo, mut hi) = self.bracket(x)?;
        // bisection on the log axis: 60 halvings of the log-width
        for _ in 0..60 {
            let mid = (lo * hi).sqrt();
            if mid <= lo || mid >= hi {
                break;
            }
            if self.g(mid)? < x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = (lo * hi).sqrt();
        let g = self.g(t)?;
        if (g / x - 1.0).abs() > self.rel_tol.max(1e4 * f64::EPSILON) {
            return Err(Error::BracketFailure { op: "K", target: x });
        }
        Ok(t)
    }

    fn bracket(&self, x: f64) -> Result<(f64, f64)> {
        // start from the memoized grid when x falls inside it
        if !self.grid_g.is_empty()
            && x >= self.grid_g[0]
            && x <= *self.grid_g.last().unwrap()
        {
            let i = match self
                .grid_g
                .binary_search_by(|v| v.partial_cmp(&x).unwrap())
            {
                Ok(i) => return Ok((self.grid_t[i], self.grid_t[i])),
                Err(i) => i,
            };
            return Ok((self.grid_t[i - 1], self.grid_t[i]));
        }
        // cold expansion
        let mut lo = 1.0;
        let mut hi = 1.0;
        let mut steps = 0;
        while self.g(lo)? > x {
            lo /= 4.0;
            steps += 1;
            if steps > 600 || lo < 1e-290 {
                return Err(Error::BracketFailure { op: "K", target: x });
            }
        }
        steps = 0;
        while self.g(hi)? < x {
            hi *= 4.0;
            steps += 1;
            if steps > 600 || hi > 1e290 {
                return Err(Error::BracketFailure { op: "K", target: x });
            }
        }
        Ok((lo, hi))
    }

    /// `ln K` with the argument given as `ln x`.
    pub fn ln_k(&self, ln_x: f64) -> Result<f64> {
        // bracket in u = ln t; ln G grows with slope in [1, 2] in u, so a
        // doubling expansion around ln_x/2 terminates quickly
        let mut lo = 0.5 * ln_x;
        let mut hi = 0.5 * ln_x;
        let mut step = 2.0;
        let mut steps = 0;
        while self.ln_g(lo)? > ln_x {
            lo -= step;
            step *= 2.0;
            steps += 1;
            if steps > 64 {
                return Err(Error::BracketFailure { op: "ln_K", target: ln_x });
            }
        }
        step = 2.0;
        steps = 0;
        while self.ln_g(hi)? < ln_x {
            hi += step;
            step *= 2.0;
            steps += 1;
            if steps > 64 {
                return Err(Error::BracketFailure { op: "ln_K", target: ln_x });
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= 1e-13 * hi.abs().max(1.0) {
                break;
            }
            if self.ln_g(mid)? < ln_x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// `ln K(x) = 0.5 ln x + 0.5 ln(H(K) + K·M(K))` — the exact identity
    /// from `G(K(x)) = x`.  Returned as the split `(0.5, remainder)`, so the
    /// `x`-scale part can cancel in coefficient arithmetic downstream; the
    /// remainder only needs the inverse point to slowly-varying precision.
    pub fn ln_k_split(&self, ln_x: f64) -> Result<(f64, f64)> {
        let ln_t = self.ln_k(ln_x)?;
        let ln_denom = log_sum_exp(self.dist.ln_h(ln_t), ln_t + self.dist.ln_m(ln_t)?);
        Ok((0.5, 0.5 * ln_denom))
    }

    /// `ln γ` as the split `(0.5, remainder)` at `u = ln n`.
    pub fn ln_gamma_split(&self, u: f64) -> Result<(f64, f64)> {
        let lln = l_raw(l_of_ln(u));
        let (_, kr) = self.ln_k_split(u - lln.ln())?;
        Ok((0.5, kr + 0.5 * std::f64::consts::LN_2 + 0.5 * lln.ln()))
    }

    /// γ_n = √2 · K(n / LLn) · LLn.
    pub fn gamma_n(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain { op: "gamma_n", message: "n must be >= 1", value: 0.0 });
        }
        let nf = n as f64;
        let lln = ll_raw(nf);
        Ok(SQRT_2 * self.k(nf / lln)? * lln)
    }

    /// `ln γ` at real-valued `ln n`; used by the sequence diagnostics on
    /// ranges where `n` itself is not representable.
    pub fn ln_gamma(&self, ln_n: f64) -> Result<f64> {
        let lln = l_raw(l_of_ln(ln_n));
        Ok(0.5 * std::f64::consts::LN_2 + self.ln_k(ln_n - lln.ln())? + lln.ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logscale::E;

    #[test]
    fn rademacher_g_values() {
        let k = KlassEval::new(DistributionSpec::Rademacher).unwrap();
        assert!((k.g(2.0).unwrap() - 4.0).abs() < 1e-14); // H=1, M=0
        assert!((k.g(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((k.g(0.5).unwrap() - 0.5).abs() < 1e-14); // H=0, M=1 -> G=t
    }

    #[test]
    fn feller_pruitt_g_value() {
        let k = KlassEval::new(DistributionSpec::feller_pruitt()).unwrap();
        // H(e) = 2, e M(e) = 2 -> G(e) = e^2/4
        assert!((k.g(E).unwrap() - E * E / 4.0).abs() < 1e-12);
    }

    #[test]
    fn rademacher_k_is_sqrt() {
        let k = KlassEval::new(DistributionSpec::Rademacher).unwrap();
        assert!((k.k(9.0).unwrap() - 3.0).abs() < 1e-9);
        assert!((k.k(1e12).unwrap() / 1e6 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn k_round_trip() {
        for dist in [
            DistributionSpec::Rademacher,
            DistributionSpec::gaussian(2.0).unwrap(),
            DistributionSpec::feller_pruitt(),
        ] {
            let k = KlassEval::new(dist).unwrap();
            let mut t = 1e-5;
            while t < 1e8 {
                let x = k.g(t).unwrap();
                let back = k.k(x).unwrap();
                assert!((back / t - 1.0).abs() < 1e-8, "t={t} back={back}");
                t *= 7.3;
            }
        }
    }

    #[test]
    fn k_over_sqrt_monotone_to_sigma() {
        // K(x)/sqrt(x) climbs toward sqrt(E X^2)
        let k = KlassEval::new(DistributionSpec::gaussian(1.0).unwrap()).unwrap();
        let mut prev = 0.0;
        let mut x = 10.0;
        let mut last = 0.0;
        while x <= 1e10 {
            let r = k.k(x).unwrap() / x.sqrt();
            assert!(r >= prev - 1e-9, "x={x} r={r} prev={prev}");
            prev = r;
            last = r;
            x *= 10.0;
        }
        assert!((last - 1.0).abs() < 1e-3);
    }

    #[test]
    fn k_over_x_decreasing_to_zero() {
        // K(x)/x falls toward 0
        for dist in [DistributionSpec::Rademacher, DistributionSpec::feller_pruitt()] {
            let k = KlassEval::new(dist).unwrap();
            let mut prev = f64::INFINITY;
            let mut x = 1.0;
            while x <= 1e12 {
                let r = k.k(x).unwrap() / x;
                assert!(r <= prev + 1e-12);
                prev = r;
                x *= 10.0;
            }
            assert!(prev < 1e-3);
        }
    }

    #[test]
    fn gamma_rademacher_closed_form() {
        let k = KlassEval::new(DistributionSpec::Rademacher).unwrap();
        for n in [1u64, 2, 10, 1000, 1_000_000, 10u64.pow(12)] {
            let nf = n as f64;
            let lln = ll_raw(nf);
            let expect = (2.0 * nf * lln).sqrt();
            let g = k.gamma_n(n).unwrap();
            assert!((g / expect - 1.0).abs() < 1e-8, "n={n} g={g} expect={expect}");
        }
    }

    #[test]
    fn gamma_one_is_sqrt2_k1() {
        let k = KlassEval::new(DistributionSpec::Rademacher).unwrap();
        let g1 = k.gamma_n(1).unwrap();
        assert!((g1 - SQRT_2 * k.k(1.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn gamma_gaussian_ratio_tends_to_one() {
        let sigma = 2.0;
        let k = KlassEval::new(DistributionSpec::gaussian(sigma).unwrap()).unwrap();
        let mut n = 1000u64;
        let mut last = 0.0;
        while n <= 10u64.pow(12) {
            let nf = n as f64;
            let lln = ll_raw(nf);
            last = k.gamma_n(n).unwrap() / (sigma * (2.0 * nf * lln).sqrt());
            assert!(last <= 1.0 + 1e-9);
            n *= 1000;
        }
        assert!((last - 1.0).abs() < 1e-3);
    }

    #[test]
    fn degenerate_law_reports_error() {
        let tab = crate::distmodel::TailTable::new(vec![(1e-9, 0.0)]).unwrap();
        let r = KlassEval::new(DistributionSpec::TailTable(tab));
        assert!(r.is_err() || r.unwrap().g(1.0).is_err());
    }

    #[test]
    fn ln_forms_agree() {
        for dist in [
            DistributionSpec::Rademacher,
            DistributionSpec::gaussian(1.0).unwrap(),
            DistributionSpec::feller_pruitt(),
        ] {
            let k = KlassEval::new(dist).unwrap();
            for ln_t in [0.1f64, 1.0, 5.0, 20.0] {
                let lin = k.g(ln_t.exp()).unwrap().ln();
                let log = k.ln_g(ln_t).unwrap();
                assert!((lin - log).abs() < 1e-9, "ln_t={ln_t}");
            }
            for ln_x in [0.5f64, 3.0, 15.0] {
                let lin = k.k(ln_x.exp()).unwrap().ln();
                let log = k.ln_k(ln_x).unwrap();
                assert!((lin - log).abs() < 1e-8, "ln_x={ln_x}");
            }
            // gamma at astronomic n: ln_gamma agrees with gamma_n where both exist
            let lg = k.ln_gamma((1e9f64).ln()).unwrap();
            let g = k.gamma_n(10u64.pow(9)).unwrap();
            assert!((lg - g.ln()).abs() < 1e-7);
        }
    }
}
