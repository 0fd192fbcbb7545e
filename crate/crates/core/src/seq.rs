//! Normalizing sequences `c_n`.
//!
//! One abstraction serves both the cluster-radius machinery and the
//! simulator: the Klass sequence `γ_n`, a `Ψ(n)` sequence, a scaled variant
//! of either, or an explicit table.  Every source is evaluable at real
//! `ln n` so the diagnostics can probe far beyond representable `n`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::klass::KlassEval;
use crate::logscale::l_of_ln;
use crate::normalizer::Normalizer;

#[derive(Debug, Clone)]
pub enum NormSeq {
    /// The universal Klass sequence `γ_n`.
    Gamma(Arc<KlassEval>),
    /// `c_n = Ψ(n)`.
    Psi(Arc<Normalizer>),
    /// `c_n = factor · base_n`.
    Scaled { base: Box<NormSeq>, factor: f64 },
    /// Explicit `(n, c_n)` table, log-log interpolated between nodes.
    Table { ns: Vec<u64>, cs: Vec<f64> },
}

impl NormSeq {
    pub fn gamma(k: Arc<KlassEval>) -> Self {
        NormSeq::Gamma(k)
    }

    pub fn psi(nm: Normalizer) -> Self {
        NormSeq::Psi(Arc::new(nm))
    }

    pub fn scaled(base: NormSeq, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::Domain { op: "norm_seq", message: "factor must be > 0", value: factor });
        }
        Ok(NormSeq::Scaled { base: Box::new(base), factor })
    }

    pub fn table(points: Vec<(u64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Table("explicit sequence needs at least two points".into()));
        }
        let mut ns = Vec::with_capacity(points.len());
        let mut cs = Vec::with_capacity(points.len());
        for (i, &(n, c)) in points.iter().enumerate() {
            if n == 0 {
                return Err(Error::Table(format!("row {i}: n must be >= 1")));
            }
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::Table(format!("row {i}: c must be positive")));
            }
            if let Some(&prev) = ns.last() {
                if n <= prev {
                    return Err(Error::Table(format!("row {i}: n not strictly increasing")));
                }
            }
            ns.push(n);
            cs.push(c);
        }
        Ok(NormSeq::Table { ns, cs })
    }

    pub fn label(&self) -> String {
        match self {
            NormSeq::Gamma(_) => "gamma".into(),
            NormSeq::Psi(nm) => nm.label(),
            NormSeq::Scaled { base, factor } => format!("{factor}*{}", base.label()),
            NormSeq::Table { ns, .. } => format!("table({} points)", ns.len()),
        }
    }

    /// `c(n)`.
    pub fn c(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain { op: "norm_seq", message: "n must be >= 1", value: 0.0 });
        }
        match self {
            NormSeq::Gamma(k) => k.gamma_n(n),
            NormSeq::Psi(nm) => Ok(nm.a(n)),
            NormSeq::Scaled { base, factor } => Ok(factor * base.c(n)?),
            NormSeq::Table { ns, cs } => {
                if let Ok(i) = ns.binary_search(&n) {
                    return Ok(cs[i]);
                }
                let u = (n as f64).ln();
                Ok(table_ln_interp(ns, cs, u)?.exp())
            }
        }
    }

    /// `ln c` at real-valued `u = ln n`.
    pub fn ln_c(&self, u: f64) -> Result<f64> {
        match self {
            NormSeq::Gamma(k) => k.ln_gamma(u),
            NormSeq::Psi(nm) => Ok(nm.ln_psi(u)),
            NormSeq::Scaled { base, factor } => Ok(factor.ln() + base.ln_c(u)?),
            NormSeq::Table { ns, cs } => table_ln_interp(ns, cs, u),
        }
    }

    /// `ln c` as a split `(k, r)` with `ln c = k·u + r`; the `u`-linear part
    /// is exact (`k = 1/2` for Ψ- and γ-sequences), so combinations like
    /// `2 ln c - u` can be formed without catastrophic cancellation at
    /// `u ~ 1e300`.
    pub fn ln_c_split(&self, u: f64) -> Result<(f64, f64)> {
        match self {
            NormSeq::Gamma(k) => k.ln_gamma_split(u),
            NormSeq::Psi(nm) => Ok((0.5, 0.5 * nm.h().ln_eval_lx(l_of_ln(u)))),
            NormSeq::Scaled { base, factor } => {
                let (k, r) = base.ln_c_split(u)?;
                Ok((k, r + factor.ln()))
            }
            NormSeq::Table { ns, cs } => Ok((0.0, table_ln_interp(ns, cs, u)?)),
        }
    }

    /// The scale factor accumulated through `Scaled` wrappers, and the
    /// unscaled core.  The simulator divides by the two parts separately so
    /// scaling a normalizer rescales its outputs exactly.
    pub fn split_scale(&self) -> (&NormSeq, f64) {
        match self {
            NormSeq::Scaled { base, factor } => {
                let (core, inner) = base.split_scale();
                (core, factor * inner)
            }
            other => (other, 1.0),
        }
    }
}

fn table_ln_interp(ns: &[u64], cs: &[f64], u: f64) -> Result<f64> {
    let lo = (ns[0] as f64).ln();
    let hi = (ns[ns.len() - 1] as f64).ln();
    if u < lo - 1e-12 || u > hi + 1e-12 {
        return Err(Error::Domain {
            op: "norm_seq_table",
            message: "ln n outside table range; explicit sequences are not extrapolated",
            value: u,
        });
    }
    let ln_ns: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let i = match ln_ns.binary_search_by(|v| v.partial_cmp(&u).unwrap()) {
        Ok(i) => return Ok(cs[i].ln()),
        Err(0) => 0,
        Err(i) if i >= ln_ns.len() => ln_ns.len() - 2,
        Err(i) => i - 1,
    };
    let frac = (u - ln_ns[i]) / (ln_ns[i + 1] - ln_ns[i]);
    Ok(cs[i].ln() + frac * (cs[i + 1].ln() - cs[i].ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distmodel::DistributionSpec;
    use crate::logscale::ll_raw;
    use crate::normalizer::SlowFunction;

    #[test]
    fn gamma_seq_matches_klass() {
        let k = Arc::new(KlassEval::new(DistributionSpec::Rademacher).unwrap());
        let seq = NormSeq::gamma(k.clone());
        for n in [1u64, 100, 10_000] {
            assert_eq!(seq.c(n).unwrap(), k.gamma_n(n).unwrap());
        }
    }

    #[test]
    fn scaled_seq_multiplies() {
        let nm = Normalizer::new(SlowFunction::loglog_power(1.0).unwrap()).unwrap();
        let base = NormSeq::psi(nm);
        let scaled = NormSeq::scaled(base.clone(), 3.0).unwrap();
        for n in [2u64, 1000] {
            assert!((scaled.c(n).unwrap() / base.c(n).unwrap() - 3.0).abs() < 1e-14);
        }
        let (_, f) = scaled.split_scale();
        assert_eq!(f, 3.0);
        // psi(loglog-power(1)) gives sqrt(2 n LLn)
        let n = 4096u64;
        let want = (2.0 * n as f64 * ll_raw(n as f64)).sqrt();
        assert!((base.c(n).unwrap() / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_seq_interpolates_and_bounds() {
        let seq = NormSeq::table(vec![(1, 1.0), (100, 10.0), (10_000, 100.0)]).unwrap();
        assert_eq!(seq.c(100).unwrap(), 10.0);
        // log-log midpoint
        let v = seq.c(10).unwrap();
        assert!((v - 10f64.sqrt()).abs() < 1e-12);
        assert!(seq.c(1_000_000).is_err());
        assert!(NormSeq::table(vec![(1, 1.0)]).is_err());
        assert!(NormSeq::table(vec![(1, 1.0), (1, 2.0)]).is_err());
    }
}
