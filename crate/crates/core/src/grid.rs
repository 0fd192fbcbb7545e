//! Evaluation grids for asymptotic diagnostics.
//!
//! The functionals probed here settle on triple-log scales, so the grids
//! are geometric in `ln x`: the deepest points correspond to
//! `x = exp(1e300)`, far beyond `f64::MAX`, and all evaluation goes through
//! the log-scale entry points of the other modules.

/// A grid of `ln x` values, geometric in `ln x`.
#[derive(Debug, Clone)]
pub struct AsymptoticGrid {
    pub ln_x: Vec<f64>,
}

impl AsymptoticGrid {
    /// Grid from `x = 10` down to depth `ln x = 10^depth_exponent`, with
    /// `points_per_decade` points per decade of `ln x`.
    pub fn deep(depth_exponent: f64, points_per_decade: usize) -> Self {
        let lo = 10f64.ln();
        let hi = 10f64.powf(depth_exponent);
        let decades = (hi / lo).log10();
        let count = ((decades * points_per_decade as f64).ceil() as usize).max(2);
        let step = (hi / lo).ln() / count as f64;
        let ln_x = (0..=count).map(|k| lo * (k as f64 * step).exp()).collect();
        AsymptoticGrid { ln_x }
    }

    /// Default diagnostic grid: depth 10^300, 4 points per decade.
    pub fn default_deep() -> Self {
        Self::deep(300.0, 4)
    }

    /// The trailing fraction of the grid (`0 < frac <= 1`).
    pub fn trailing(&self, frac: f64) -> &[f64] {
        let n = self.ln_x.len();
        let start = ((1.0 - frac) * n as f64) as usize;
        &self.ln_x[start.min(n - 1)..]
    }
}
