//! Streaming Monte Carlo of partial sums `S_n` and the normalized
//! diagnostics `S_n/a_n`.
//!
//! Each path consumes its own counter-based substream keyed by
//! `(seed, path index)`, so results are bit-identical under any thread
//! layout; aggregation is an ordered reduction by path index.  Draws are
//! never retained: sums stream through Neumaier-compensated accumulation
//! (plain summation is available for comparison), and the running maximum
//! of `|S_n|/a_n` is tracked at every step.
//!
//! LIL limits themselves are not reachable at simulation scale — iterated
//! logarithms move too slowly — so the outputs are finite-n diagnostics:
//! checkpoint trajectories, per-path running maxima, and pooled cluster
//! histograms.

use rayon::prelude::*;
use serde::Serialize;

use crate::distmodel::DistributionSpec;
use crate::error::{Error, Result};
use crate::rng::Substream;
use crate::seq::NormSeq;

/// Summation mode for the streaming accumulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Summation {
    Plain,
    /// Neumaier-compensated (default): rounding error stays at ulp scale
    /// independent of n.
    Compensated,
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub dist: DistributionSpec,
    pub normalizer: NormSeq,
    pub n_max: u64,
    pub paths: u32,
    /// first checkpoint (default 1000).
    pub checkpoint_first: u64,
    /// geometric checkpoint ratio (default 1.2).
    pub checkpoint_ratio: f64,
    pub seed: u64,
    pub summation: Summation,
}

impl SimConfig {
    pub fn new(dist: DistributionSpec, normalizer: NormSeq, n_max: u64, paths: u32, seed: u64) -> Self {
        SimConfig {
            dist,
            normalizer,
            n_max,
            paths,
            checkpoint_first: 1000,
            checkpoint_ratio: 1.2,
            seed,
            summation: Summation::Compensated,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(Error::Config("paths must be >= 1".into()));
        }
        if self.n_max > 10u64.pow(10) {
            return Err(Error::Config("n_max must be <= 1e10".into()));
        }
        if self.n_max < self.checkpoint_first {
            return Err(Error::Config("n_max must reach the first checkpoint".into()));
        }
        if !(self.checkpoint_ratio > 1.0) {
            return Err(Error::Config("checkpoint ratio must exceed 1".into()));
        }
        Ok(())
    }

    /// Geometric checkpoint schedule, ending exactly at `n_max`.
    pub fn checkpoints(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let mut n = self.checkpoint_first.max(1);
        while n < self.n_max {
            out.push(n);
            let next = (n as f64 * self.checkpoint_ratio).round() as u64;
            n = next.max(n + 1);
        }
        out.push(self.n_max);
        out
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CheckpointStat {
    pub n: u64,
    pub s_over_a: f64,
    pub running_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PathResult {
    pub path: u32,
    pub checkpoints: Vec<CheckpointStat>,
    pub running_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimResult {
    pub seed: u64,
    pub n_max: u64,
    pub normalizer: String,
    pub dist: String,
    pub paths: Vec<PathResult>,
}

impl SimResult {
    /// Pooled running max over paths.
    pub fn pooled_max(&self) -> f64 {
        self.paths.iter().map(|p| p.running_max).fold(0.0, f64::max)
    }

    /// CSV rows `(path, n, S_over_a, running_max)` with the master seed
    /// echoed in the header.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# seed={}\npath,n,S_over_a,running_max\n", self.seed);
        for p in &self.paths {
            for c in &p.checkpoints {
                out.push_str(&format!("{},{},{},{}\n", p.path, c.n, c.s_over_a, c.running_max));
            }
        }
        out
    }
}

/// Dense interpolator for `ln a(n)`, so the per-step normalizer lookup does
/// not dominate the run.  The scale factor of a `Scaled` sequence is kept
/// separate and applied as a final division, which keeps
/// "multiply `a_n` by `c`" equivalent to "divide every ratio by `c`"
/// exactly.
struct SeqEval {
    lo: f64,
    step: f64,
    ln_vals: Vec<f64>,
    factor: f64,
}

impl SeqEval {
    fn build(seq: &NormSeq, n_max: u64) -> Result<Self> {
        let (core, factor) = seq.split_scale();
        let lo = 0.0f64;
        let hi = (n_max as f64).ln() + 1e-9;
        let per_decade = 256usize;
        let count = ((hi - lo) / std::f64::consts::LN_10 * per_decade as f64).ceil() as usize + 2;
        let step = (hi - lo) / (count - 1) as f64;
        let mut ln_vals = Vec::with_capacity(count);
        for k in 0..count {
            let u = lo + k as f64 * step;
            let v = core.ln_c(u)?;
            if !v.is_finite() {
                return Err(Error::Config(format!("normalizer not finite at ln n = {u}")));
            }
            ln_vals.push(v);
        }
        Ok(SeqEval { lo, step, ln_vals, factor })
    }

    /// Unscaled `a(n)`; the caller divides by `factor` separately.
    #[inline]
    fn base_a(&self, n: u64) -> f64 {
        let u = (n as f64).ln();
        let pos = (u - self.lo) / self.step;
        let i = (pos as usize).min(self.ln_vals.len() - 2);
        let frac = pos - i as f64;
        (self.ln_vals[i] + frac * (self.ln_vals[i + 1] - self.ln_vals[i])).exp()
    }
}

/// Run the simulation; deterministic for a fixed config under any thread
/// layout.
pub fn run_sim(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let checkpoints = cfg.checkpoints();
    let eval = SeqEval::build(&cfg.normalizer, cfg.n_max)?;
    // normalizer must be positive at all checkpoints
    for &n in &checkpoints {
        let a = eval.base_a(n) * eval.factor;
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Config(format!("normalizer not positive at checkpoint n = {n}")));
        }
    }
    let path_results: Result<Vec<PathResult>> = (0..cfg.paths)
        .into_par_iter()
        .map(|path| run_path(cfg, path, &checkpoints, &eval))
        .collect();
    Ok(SimResult {
        seed: cfg.seed,
        n_max: cfg.n_max,
        normalizer: cfg.normalizer.label(),
        dist: cfg.dist.label(),
        paths: path_results?,
    })
}

fn run_path(
    cfg: &SimConfig,
    path: u32,
    checkpoints: &[u64],
    eval: &SeqEval,
) -> Result<PathResult> {
    let mut stream = Substream::new(cfg.seed, path as u64);
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let compensated = cfg.summation == Summation::Compensated;
    let mut running_max = 0.0f64;
    let mut stats = Vec::with_capacity(checkpoints.len());
    let mut next_checkpoint = 0usize;
    let factor = eval.factor;
    for n in 1..=cfg.n_max {
        let x = cfg.dist.sample_one(&mut stream);
        if compensated {
            // Neumaier update
            let t = sum + x;
            if sum.abs() >= x.abs() {
                comp += (sum - t) + x;
            } else {
                comp += (x - t) + sum;
            }
            sum = t;
        } else {
            sum += x;
        }
        let s = if compensated { sum + comp } else { sum };
        if s.abs() > 1e300 {
            return Err(Error::Config(format!("partial sum overflow at n = {n}")));
        }
        let ratio = (s / eval.base_a(n)) / factor;
        let abs_ratio = ratio.abs();
        if abs_ratio > running_max {
            running_max = abs_ratio;
        }
        if next_checkpoint < checkpoints.len() && n == checkpoints[next_checkpoint] {
            stats.push(CheckpointStat { n, s_over_a: ratio, running_max });
            next_checkpoint += 1;
        }
    }
    Ok(PathResult { path, checkpoints: stats, running_max })
}

/// Pooled histogram of the post-burn-in checkpoint values.
#[derive(Debug, Clone, Serialize)]
pub struct ClusterHistogram {
    pub seed: u64,
    /// bin edges are symmetric over `[-m, m]`, `m = max |value|`.
    pub bin_lo: Vec<f64>,
    pub bin_hi: Vec<f64>,
    pub mass: Vec<f64>,
    /// total-variation distance between the histogram and its mirror.
    pub symmetry: f64,
    /// fraction of bins in `[-m, m]` carrying mass.
    pub occupancy: f64,
}

impl ClusterHistogram {
    pub fn to_csv(&self) -> String {
        let mut out = format!("# seed={}\nbin_lo,bin_hi,mass\n", self.seed);
        for i in 0..self.mass.len() {
            out.push_str(&format!("{},{},{}\n", self.bin_lo[i], self.bin_hi[i], self.mass[i]));
        }
        out
    }
}

pub fn cluster_histogram(res: &SimResult, bins: usize, burn_in: usize) -> Result<ClusterHistogram> {
    if bins == 0 {
        return Err(Error::Config("bins must be >= 1".into()));
    }
    let mut values = Vec::new();
    for p in &res.paths {
        if burn_in >= p.checkpoints.len() {
            return Err(Error::Config("burn-in swallows every checkpoint".into()));
        }
        values.extend(p.checkpoints[burn_in..].iter().map(|c| c.s_over_a));
    }
    if values.is_empty() {
        return Err(Error::Config("no checkpoint values to histogram".into()));
    }
    let m = values.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    if m == 0.0 {
        // degenerate sample: a single bin at 0
        return Ok(ClusterHistogram {
            seed: res.seed,
            bin_lo: vec![0.0],
            bin_hi: vec![0.0],
            mass: vec![1.0],
            symmetry: 0.0,
            occupancy: 1.0,
        });
    }
    let width = 2.0 * m / bins as f64;
    let mut mass = vec![0.0f64; bins];
    let total = values.len() as f64;
    for v in &values {
        let mut idx = ((v + m) / width) as usize;
        if idx >= bins {
            idx = bins - 1;
        }
        mass[idx] += 1.0 / total;
    }
    let symmetry = 0.5
        * (0..bins)
            .map(|i| (mass[i] - mass[bins - 1 - i]).abs())
            .sum::<f64>();
    let occupancy = mass.iter().filter(|&&p| p > 0.0).count() as f64 / bins as f64;
    let bin_lo: Vec<f64> = (0..bins).map(|i| -m + i as f64 * width).collect();
    let bin_hi: Vec<f64> = (0..bins).map(|i| -m + (i + 1) as f64 * width).collect();
    Ok(ClusterHistogram { seed: res.seed, bin_lo, bin_hi, mass, symmetry, occupancy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distmodel::TailTable;
    use crate::normalizer::{Normalizer, SlowFunction};

    fn loglog_norm() -> NormSeq {
        NormSeq::psi(Normalizer::new(SlowFunction::loglog_power(1.0).unwrap()).unwrap())
    }

    fn small_cfg(dist: DistributionSpec, n_max: u64) -> SimConfig {
        SimConfig::new(dist, loglog_norm(), n_max, 4, 42)
    }

    #[test]
    fn config_validation() {
        let mut cfg = small_cfg(DistributionSpec::Rademacher, 10_000);
        cfg.paths = 0;
        assert!(run_sim(&cfg).is_err());
        let mut cfg = small_cfg(DistributionSpec::Rademacher, 10_000);
        cfg.n_max = 10;
        assert!(run_sim(&cfg).is_err());
    }

    #[test]
    fn degenerate_dist_gives_zeros() {
        let tab = TailTable::new(vec![(1e-9, 0.0)]).unwrap();
        let cfg = small_cfg(DistributionSpec::TailTable(tab), 10_000);
        let res = run_sim(&cfg).unwrap();
        assert_eq!(res.pooled_max(), 0.0);
        for p in &res.paths {
            assert!(p.checkpoints.iter().all(|c| c.s_over_a == 0.0 && c.running_max == 0.0));
        }
        let h = cluster_histogram(&res, 16, 0).unwrap();
        assert_eq!(h.mass, vec![1.0]);
        assert_eq!(h.symmetry, 0.0);
    }

    #[test]
    fn determinism_across_thread_layouts() {
        let cfg = small_cfg(DistributionSpec::gaussian(1.0).unwrap(), 50_000);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_sim(&cfg).unwrap());
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(|| run_sim(&cfg).unwrap());
        assert_eq!(serde_json::to_string(&one).unwrap(), serde_json::to_string(&many).unwrap());
    }

    #[test]
    fn running_max_is_nondecreasing_and_pooled() {
        let cfg = small_cfg(DistributionSpec::feller_pruitt(), 100_000);
        let res = run_sim(&cfg).unwrap();
        for p in &res.paths {
            let mut prev = 0.0;
            for c in &p.checkpoints {
                assert!(c.running_max >= prev);
                assert!(c.running_max >= c.s_over_a.abs());
                prev = c.running_max;
            }
            assert_eq!(prev, p.running_max);
        }
        let pooled = res.pooled_max();
        assert!(res.paths.iter().all(|p| p.running_max <= pooled));
    }

    #[test]
    fn normalizer_scaling_divides_exactly() {
        let base_cfg = small_cfg(DistributionSpec::Rademacher, 20_000);
        let mut scaled_cfg = base_cfg.clone();
        scaled_cfg.normalizer = NormSeq::scaled(loglog_norm(), 2.0).unwrap();
        let base = run_sim(&base_cfg).unwrap();
        let scaled = run_sim(&scaled_cfg).unwrap();
        for (p, q) in base.paths.iter().zip(&scaled.paths) {
            assert_eq!(p.running_max / 2.0, q.running_max);
            for (a, b) in p.checkpoints.iter().zip(&q.checkpoints) {
                assert_eq!(a.s_over_a / 2.0, b.s_over_a);
            }
        }
    }

    #[test]
    fn compensated_vs_plain_close_on_gaussian() {
        let mut cfg = small_cfg(DistributionSpec::gaussian(1.0).unwrap(), 1_000_000);
        cfg.paths = 2;
        cfg.summation = Summation::Compensated;
        let comp = run_sim(&cfg).unwrap();
        cfg.summation = Summation::Plain;
        let plain = run_sim(&cfg).unwrap();
        for (p, q) in comp.paths.iter().zip(&plain.paths) {
            for (a, b) in p.checkpoints.iter().zip(&q.checkpoints) {
                let denom = a.s_over_a.abs().max(1e-3);
                assert!(
                    (a.s_over_a - b.s_over_a).abs() / denom < 1e-9,
                    "n={} comp={} plain={}",
                    a.n,
                    a.s_over_a,
                    b.s_over_a
                );
            }
        }
    }

    #[test]
    fn integer_sums_are_exact() {
        // rademacher sums are integers: compensated and plain agree exactly
        let mut cfg = small_cfg(DistributionSpec::Rademacher, 200_000);
        cfg.summation = Summation::Compensated;
        let comp = run_sim(&cfg).unwrap();
        cfg.summation = Summation::Plain;
        let plain = run_sim(&cfg).unwrap();
        for (p, q) in comp.paths.iter().zip(&plain.paths) {
            for (a, b) in p.checkpoints.iter().zip(&q.checkpoints) {
                assert_eq!(a.s_over_a, b.s_over_a);
            }
        }
    }

    #[test]
    fn histogram_mass_and_symmetry() {
        let mut cfg = small_cfg(DistributionSpec::gaussian(1.0).unwrap(), 200_000);
        cfg.paths = 8;
        let res = run_sim(&cfg).unwrap();
        let h = cluster_histogram(&res, 21, 5).unwrap();
        let total: f64 = h.mass.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(h.symmetry >= 0.0 && h.symmetry <= 1.0);
        assert!(h.occupancy > 0.0 && h.occupancy <= 1.0);
        assert!(cluster_histogram(&res, 21, 10_000).is_err());
    }

    #[test]
    fn csv_round_trip_shape() {
        let cfg = small_cfg(DistributionSpec::Rademacher, 5_000);
        let res = run_sim(&cfg).unwrap();
        let csv = res.to_csv();
        assert!(csv.starts_with("# seed=42\npath,n,S_over_a,running_max\n"));
        let rows = csv.lines().count() - 2;
        let expect: usize = res.paths.iter().map(|p| p.checkpoints.len()).sum();
        assert_eq!(rows, expect);
    }
}
