//! Convergence/divergence classification for positive series from finite
//! block evidence.
//!
//! Divergence of an infinite series is classified, never decided.  The
//! evidence is a sequence of block sums `B_i` over exponent-dyadic windows
//! (`ln n ∈ [2^i, 2^{i+1})`), which turns the families met here into
//! recognizable shapes:
//!
//! * geometric blocks (ratio < 1)            -> convergent,
//! * flat or growing blocks                  -> divergent,
//! * power blocks `B_i ~ i^{-s}`             -> convergent iff `s > 1`,
//! * `B_i ~ i^{-1} (log i)^{-θ}`             -> convergent iff `θ > 1`,
//! * spiked oscillating blocks               -> ratio of successive spike
//!   packets decides.
//!
//! Boundary cases (`s = 1` exactly, `θ` near 1) are resolved toward
//! "divergent": the quantities classified here are suprema over divergence
//! sets, and the near-flat triple-log shapes genuinely diverge.
//!
//! A separate tool, [`fit_limit`], estimates the limit of a slowly settling
//! positive sequence by fitting `A + B x^{-e}` decay models; the cluster
//! radius machinery uses it to read off `lim exponent(n)/LLn`.

use serde::Serialize;

/// Verdict for a positive series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesVerdict {
    Finite,
    Infinite,
    Inconclusive,
}

/// Outcome of block classification, with the route that decided it.
#[derive(Debug, Clone, Serialize)]
pub struct BlockClassification {
    pub verdict: SeriesVerdict,
    pub route: &'static str,
    pub geo_ratio: Option<f64>,
    pub power_slope: Option<f64>,
}

const FLOOR: f64 = 1e-280;
/// Tie margin around the critical power slope 1; ties go to "infinite".
const POWER_MARGIN: f64 = 0.01;
/// Tie margin around the critical log-power exponent 1.
const LOG_POWER_MARGIN: f64 = 0.15;

/// Least-squares line `y = a + b x`; returns `(a, b, rms residual)`.
fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-300 {
        return (sy / n, 0.0, 0.0);
    }
    let b = (n * sxy - sx * sy) / det;
    let a = (sy - b * sx) / n;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - a - b * x;
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    (a, b, rms)
}

fn direction_changes(w: &[f64]) -> usize {
    let mut changes = 0;
    let mut dir = 0i8;
    for pair in w.windows(2) {
        let d = if pair[1] > pair[0] * (1.0 + 1e-12) {
            1
        } else if pair[1] < pair[0] * (1.0 - 1e-12) {
            -1
        } else {
            0
        };
        if d != 0 {
            if dir != 0 && d != dir {
                changes += 1;
            }
            dir = d;
        }
    }
    changes
}

/// Classify the series whose block sums are `blocks[i]`, blocks indexed from
/// `first_index` (indices enter the power fits, so they must be the true
/// exponent-dyadic indices).
pub fn classify_blocks(blocks: &[f64], first_index: u32) -> BlockClassification {
    let n = blocks.len();
    if n < 8 {
        return BlockClassification {
            verdict: SeriesVerdict::Inconclusive,
            route: "too-few-blocks",
            geo_ratio: None,
            power_slope: None,
        };
    }
    let w_start = n / 2;
    let w = &blocks[w_start..];

    // 1. terms vanished beyond double precision
    if w.iter().all(|&b| b <= FLOOR) {
        return BlockClassification {
            verdict: SeriesVerdict::Finite,
            route: "vanished",
            geo_ratio: None,
            power_slope: None,
        };
    }

    // 2. spiked evidence: an interior peak towering over the positive
    // median routes to packet comparison (oscillating integrands)
    let mut positives: Vec<f64> = w.iter().cloned().filter(|&b| b > FLOOR).collect();
    positives.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = positives[positives.len() / 2];
    let has_peak = (1..w.len() - 1)
        .any(|i| w[i] > 10.0 * median && w[i] >= w[i - 1] && w[i] > w[i + 1]);
    if has_peak {
        return classify_spikes(blocks);
    }

    let ln_b: Vec<f64> = w.iter().map(|&b| b.max(FLOOR).ln()).collect();
    let idx: Vec<f64> = (0..ln_b.len()).map(|k| (w_start + k) as f64 + first_index as f64).collect();

    // 3. flat or growing blocks
    let quarter = (w.len() / 4).max(2);
    let head: f64 = w[..quarter].iter().sum::<f64>() / quarter as f64;
    let tail: f64 = w[w.len() - quarter..].iter().sum::<f64>() / quarter as f64;
    if tail >= 0.98 * head && tail > FLOOR {
        return BlockClassification {
            verdict: SeriesVerdict::Infinite,
            route: "bounded-below-or-growing",
            geo_ratio: Some(tail / head),
            power_slope: None,
        };
    }

    // 4. geometric fit: ln B linear in the block index
    let (_, slope_geo, rms_geo) = line_fit(&idx, &ln_b);
    let geo_span = slope_geo.abs() * (idx[idx.len() - 1] - idx[0]);
    let geo_good = rms_geo <= (0.02 * geo_span).max(1e-8);
    let ratio = slope_geo.exp();
    if geo_good && ratio <= 0.95 {
        return BlockClassification {
            verdict: SeriesVerdict::Finite,
            route: "geometric",
            geo_ratio: Some(ratio),
            power_slope: None,
        };
    }
    // super-geometric collapse that has not reached the floor yet
    if tail < 1e-12 * head && w.windows(2).all(|p| p[1] <= p[0] * (1.0 + 1e-9)) {
        return BlockClassification {
            verdict: SeriesVerdict::Finite,
            route: "super-geometric",
            geo_ratio: Some(ratio),
            power_slope: None,
        };
    }

    // 5. power stage over a longer window: compare the pure power model
    // ln B = a - s ln i against the log-power model
    // ln B = a - ln i - θ ln(ln i); the two are distinguishable only over
    // a long index range, which is why the window widens here
    let p_start = (n / 4).max(2);
    let pw = &blocks[p_start..];
    let p_lnb: Vec<f64> = pw.iter().map(|&b| b.max(FLOOR).ln()).collect();
    let p_lni: Vec<f64> =
        (0..pw.len()).map(|k| ((p_start + k) as f64 + first_index as f64).ln()).collect();
    let (_, neg_s, rms_pow) = line_fit(&p_lni, &p_lnb);
    let s = -neg_s;
    // residual after removing the exact i^{-1} factor, against ln ln i
    let resid: Vec<f64> = p_lnb.iter().zip(&p_lni).map(|(lb, li)| lb + li).collect();
    let p_llni: Vec<f64> = p_lni.iter().map(|l| l.ln()).collect();
    let (_, neg_theta, rms_log) = line_fit(&p_llni, &resid);
    let theta = -neg_theta;
    let pow_span = (s.abs() * (p_lni[p_lni.len() - 1] - p_lni[0])).max(1e-6);
    let pow_good = rms_pow <= (0.02 * pow_span).max(2e-3);
    let log_good = rms_log <= (0.02 * pow_span).max(2e-3);
    if pow_good && (!log_good || rms_pow <= rms_log) {
        let verdict = if s >= 1.0 + POWER_MARGIN {
            SeriesVerdict::Finite
        } else if s <= 1.0 - POWER_MARGIN {
            SeriesVerdict::Infinite
        } else if theta >= 1.0 + LOG_POWER_MARGIN {
            SeriesVerdict::Finite
        } else {
            // ties toward divergence at the harmonic boundary
            SeriesVerdict::Infinite
        };
        return BlockClassification {
            verdict,
            route: "power",
            geo_ratio: Some(ratio),
            power_slope: Some(s),
        };
    }
    if log_good {
        let verdict = if theta >= 1.0 + LOG_POWER_MARGIN {
            SeriesVerdict::Finite
        } else {
            // ties toward divergence at the triple-log boundary
            SeriesVerdict::Infinite
        };
        return BlockClassification {
            verdict,
            route: "power-log",
            geo_ratio: Some(ratio),
            power_slope: Some(s),
        };
    }

    // 6. near-flat geometric decay lands in the declared inconclusive zone
    if geo_good && ratio < 1.0 {
        return BlockClassification {
            verdict: SeriesVerdict::Inconclusive,
            route: "geometric-inconclusive-zone",
            geo_ratio: Some(ratio),
            power_slope: Some(s),
        };
    }

    BlockClassification {
        verdict: SeriesVerdict::Inconclusive,
        route: "no-model-fit",
        geo_ratio: Some(ratio),
        power_slope: Some(s),
    }
}

/// Spiked evidence: locate peak packets over the whole range and compare
/// successive packet masses.
fn classify_spikes(blocks: &[f64]) -> BlockClassification {
    let mut positives: Vec<f64> = blocks.iter().cloned().filter(|&b| b > FLOOR).collect();
    if positives.is_empty() {
        return BlockClassification {
            verdict: SeriesVerdict::Finite,
            route: "vanished",
            geo_ratio: None,
            power_slope: None,
        };
    }
    positives.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = positives[positives.len() / 2];
    let thresh = 3.0 * median;
    // peak packets: maximal runs around local maxima above the threshold
    let mut peaks: Vec<usize> = Vec::new();
    for i in 0..blocks.len() {
        let b = blocks[i];
        if b > thresh
            && (i == 0 || blocks[i - 1] <= b)
            && (i + 1 == blocks.len() || blocks[i + 1] < b)
        {
            peaks.push(i);
        }
    }
    if peaks.len() < 2 {
        return BlockClassification {
            verdict: SeriesVerdict::Inconclusive,
            route: "spike-single",
            geo_ratio: None,
            power_slope: None,
        };
    }
    // packet boundaries at the minima between consecutive peaks
    let mut boundaries = vec![0usize];
    for pair in peaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let mut min_at = a;
        let mut min_val = f64::INFINITY;
        for (j, &v) in blocks.iter().enumerate().take(b).skip(a) {
            if v < min_val {
                min_val = v;
                min_at = j;
            }
        }
        boundaries.push(min_at);
    }
    boundaries.push(blocks.len());
    let packet_sums: Vec<f64> = boundaries
        .windows(2)
        .map(|w| blocks[w[0]..w[1]].iter().sum())
        .collect();
    let k = packet_sums.len();
    let r = packet_sums[k - 1] / packet_sums[k - 2];
    let verdict = if r < 0.8 {
        SeriesVerdict::Finite
    } else if r > 1.25 {
        SeriesVerdict::Infinite
    } else {
        SeriesVerdict::Inconclusive
    };
    BlockClassification {
        verdict,
        route: "spike-packets",
        geo_ratio: Some(r),
        power_slope: None,
    }
}

/// A fitted limit for a slowly settling positive sequence.
#[derive(Debug, Clone, Serialize)]
pub struct LimitFit {
    /// Estimated limit; `f64::INFINITY` for unbounded growth.
    pub limit: f64,
    pub model: &'static str,
    pub rms_residual: f64,
}

/// Estimate `lim y` for samples `(x, y)` with `x` increasing (typically an
/// arithmetic grid of `LL`-values).  Tries a constant and `A + B x^{-e}`
/// decay models over the trailing window and returns the best fit, or `None`
/// when the data oscillates.
pub fn fit_limit(xs: &[f64], ys: &[f64]) -> Option<LimitFit> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 8 {
        return None;
    }
    let w = n / 2;
    let xs = &xs[w..];
    let ys = &ys[w..];
    if ys.iter().any(|y| !y.is_finite()) {
        // treat overflowing values as unbounded growth
        return Some(LimitFit { limit: f64::INFINITY, model: "overflow", rms_residual: 0.0 });
    }
    if direction_changes(ys) > 2 {
        return None;
    }
    let spread = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let increasing = ys[ys.len() - 1] > ys[0];
    // increasing with non-collapsing increments never settles
    if increasing && spread > 1e-9 {
        let k = ys.len() / 4;
        let head_inc = ys[k] - ys[0];
        let tail_inc = ys[ys.len() - 1] - ys[ys.len() - 1 - k];
        if tail_inc >= 0.9 * head_inc && tail_inc > 0.0 {
            return Some(LimitFit {
                limit: f64::INFINITY,
                model: "increasing-unbounded",
                rms_residual: 0.0,
            });
        }
    }
    // constant model
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let rms_const = (ys.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / ys.len() as f64).sqrt();
    let mut best = LimitFit { limit: mean, model: "constant", rms_residual: rms_const };
    for (e, name) in [
        (0.25, "A+B*x^-1/4"),
        (0.5, "A+B*x^-1/2"),
        (1.0, "A+B*x^-1"),
        (2.0, "A+B*x^-2"),
    ] {
        let basis: Vec<f64> = xs.iter().map(|x| x.powf(-e)).collect();
        let (a, _b, rms) = line_fit(&basis, ys);
        if rms < best.rms_residual {
            best = LimitFit { limit: a.max(0.0), model: name, rms_residual: rms };
        }
    }
    // a model must actually explain the variation
    if best.rms_residual > 0.2 * spread.max(1e-12) {
        if increasing {
            return Some(LimitFit {
                limit: f64::INFINITY,
                model: "increasing-unfit",
                rms_residual: best.rms_residual,
            });
        }
        // unsettled non-increasing data: no usable limit
        return None;
    }
    Some(best)
}

/// Block sums `B_i = sum of f(n) over ln n in [2^i, 2^{i+1})`.
///
/// The caller supplies `ln_density(u) = ln(f(e^u) · e^u)` — the log of the
/// integrand with the Jacobian already folded in.  Expressions of this form
/// must be assembled cancellation-free by the caller: at `u ~ 1e300` the
/// rounding ulp of `u` dwarfs every slowly varying term, so `ln f(e^u) + u`
/// must never be formed from two `u`-sized floats.
pub fn exponent_dyadic_blocks<F: Fn(f64) -> f64>(ln_density: &F, i_max: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(i_max as usize + 1);
    for i in 0..=i_max {
        let u_lo = 2f64.powi(i as i32);
        let u_hi = 2f64.powi(i as i32 + 1);
        if i <= 2 {
            // exact summation over the integers in [e^{u_lo}, e^{u_hi})
            let n_lo = u_lo.exp().ceil() as u64;
            let n_hi = u_hi.exp().ceil() as u64;
            let mut s = 0.0;
            for n in n_lo..n_hi {
                let u = (n as f64).ln();
                let v = ln_density(u) - u;
                if v > -700.0 {
                    s += v.exp();
                }
            }
            out.push(s);
            continue;
        }
        let sum = integral_block(ln_density, u_lo, u_hi);
        out.push(sum);
    }
    out
}

/// Block integrals `\int exp(ln_density(u)) du` over `u ∈ [2^i, 2^{i+1})`,
/// i.e. `\int g(s) ds` on exponent-dyadic windows of `u = ln s` with
/// `ln_density(u) = ln(g(e^u) · e^u)`.
pub fn exponent_dyadic_integral_blocks<F: Fn(f64) -> f64>(ln_density: &F, i_max: u32) -> Vec<f64> {
    (0..=i_max)
        .map(|i| integral_block_raw(ln_density, 2f64.powi(i as i32), 2f64.powi(i as i32 + 1)))
        .collect()
}

fn integral_block<F: Fn(f64) -> f64>(ln_density: &F, u_lo: f64, u_hi: f64) -> f64 {
    // sum ~ integral plus the Euler-Maclaurin endpoint correction; the
    // correction involves the term values themselves and only matters while
    // they are representable (small u)
    let s = integral_block_raw(ln_density, u_lo, u_hi);
    let mut corr = 0.0;
    if u_lo < 700.0 {
        let fa = ln_density(u_lo) - u_lo;
        let fb = ln_density(u_hi) - u_hi;
        corr = 0.5
            * (if fa > -700.0 { fa.exp() } else { 0.0 }
                - if fb > -700.0 && u_hi < 700.0 { fb.exp() } else { 0.0 });
    }
    (s + corr).max(0.0)
}

fn integral_block_raw<F: Fn(f64) -> f64>(ln_density: &F, u_lo: f64, u_hi: f64) -> f64 {
    // \int exp(ln_density(u)) du by composite Simpson on 64 panels
    let g = |u: f64| {
        let v = ln_density(u);
        if v > -700.0 && v < 700.0 {
            v.exp()
        } else if v >= 700.0 {
            f64::INFINITY
        } else {
            0.0
        }
    };
    let panels = 64;
    let h = (u_hi - u_lo) / panels as f64;
    let mut s = 0.0;
    for k in 0..panels {
        let a = u_lo + k as f64 * h;
        let b = a + h;
        let m = 0.5 * (a + b);
        s += (b - a) / 6.0 * (g(a) + 4.0 * g(m) + g(b));
    }
    s
}
