//! Capital growth analytics and path roughness measurements.
//!
//! A scanned game is summarized by its outcome counts, total eta-variation
//! `TV = h eta1 + t eta2` and net move `L = h eta1 - t eta2`; the round count
//! satisfies the exact identity
//! `n* = (eta1 + eta2 - sigma (eta1 - eta2)) / (2 eta1 eta2) * TV`.
//! Capital growth is predicted both exactly through
//! `n* D(p || rho) - log(n*)/2` and through the regime approximations
//! parameterized by scale bases (a1, a2). Roughness is measured by lower
//! bounds on strong p-variation over dyadic and local-extrema divisions and
//! by the induced variation-exponent estimate.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{GridParams, HitSequence};
use crate::path::PricePath;
use crate::strategy::kl;

/// Statistics of one embedded game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GameSummary {
    pub n_star: usize,
    pub heads: usize,
    pub tails: usize,
    /// Total eta-variation of log-price over completed rounds.
    pub tv: f64,
    /// Net log move over completed rounds.
    pub l: f64,
    /// L / TV; absent when no round completed.
    pub sigma: Option<f64>,
    /// Empirical head fraction h / n*; absent when no round completed.
    pub p: Option<f64>,
    /// Full-horizon log move log S(T) - log S(0).
    pub l_horizon: f64,
    pub eta1: f64,
    pub eta2: f64,
}

/// Compute the summary statistics of a scanned game.
pub fn summarize(hits: &HitSequence, grid: &GridParams, l_horizon: f64) -> GameSummary {
    let (heads, tails) = hits.counts();
    let (hf, tf) = (heads as f64, tails as f64);
    let tv = hf * grid.eta1() + tf * grid.eta2();
    let l = hf * grid.eta1() - tf * grid.eta2();
    let n_star = hits.n_star();
    let (sigma, p) = if n_star == 0 {
        (None, None)
    } else {
        (Some(l / tv), Some(hf / n_star as f64))
    };
    GameSummary {
        n_star,
        heads,
        tails,
        tv,
        l,
        sigma,
        p,
        l_horizon,
        eta1: grid.eta1(),
        eta2: grid.eta2(),
    }
}

impl GameSummary {
    /// Round count reconstructed from (TV, sigma) alone; matches `n_star`
    /// exactly up to float rounding.
    pub fn n_star_identity(&self) -> Option<f64> {
        let sigma = self.sigma?;
        Some(
            (self.eta1 + self.eta2 - sigma * (self.eta1 - self.eta2))
                / (2.0 * self.eta1 * self.eta2)
                * self.tv,
        )
    }
}

/// Which scale-base regime produced a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Symmetric,
    UpFiner,
    DownFiner,
}

/// Exact and approximate predictions of the log capital at the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapitalPrediction {
    pub regime: Regime,
    /// `n* D(p || rho) - log(n*)/2`, from the realized summary.
    pub exact: f64,
    /// The regime approximation of `n* D(p || rho)`, minus the same
    /// `log(n*)/2` correction.
    pub approx: f64,
}

/// Predict the horizon log capital of the beta-binomial strategy from a
/// summary of the game at grid `eta_i = a_i^{-k}`.
///
/// Returns `None` when no round completed.
pub fn predict_log_capital(
    summary: &GameSummary,
    a1: f64,
    a2: f64,
    k: u32,
) -> Result<Option<CapitalPrediction>> {
    if !(a1 > 1.0 && a2 > 1.0) {
        return Err(Error::validation("scale bases must exceed 1"));
    }
    let p = match summary.p {
        Some(p) => p,
        None => return Ok(None),
    };
    let n = summary.n_star as f64;
    let grid = GridParams::from_etas(a1.powi(-(k as i32)), a2.powi(-(k as i32)))?;
    let rho = grid.risk_neutral_rho();
    let exact = n * kl(p, rho)? - 0.5 * n.ln();

    let tv = summary.tv;
    let l = summary.l_horizon;
    let (regime, growth) = if a1 == a2 {
        let ak = a1.powi(k as i32);
        (
            Regime::Symmetric,
            0.5 * (ak / tv * l * l + l + 0.25 * tv / ak),
        )
    } else if a1 < a2 {
        let ak = a1.powi(k as i32);
        (Regime::UpFiner, ak / tv * l * l)
    } else {
        let ak = a2.powi(k as i32);
        (Regime::DownFiner, ak / tv * l * l + l + 0.25 * tv / ak)
    };
    Ok(Some(CapitalPrediction { regime, exact, approx: growth - 0.5 * n.ln() }))
}

/// Lower-bound estimates of strong p-variation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PVariation {
    pub p: f64,
    /// One estimate per dyadic refinement depth (depth d splits the window
    /// into 2^d cells snapped to the grid).
    pub dyadic: Vec<f64>,
    /// Sum over the greedy division through local extrema of the sample.
    pub extrema: f64,
    /// Best lower bound across the implemented division family.
    pub best: f64,
}

fn window_indices(path: &PricePath, t1: f64, t2: f64) -> (usize, usize) {
    let times = path.times();
    let lo = times.partition_point(|&t| t < t1).min(times.len() - 2);
    let hi = times.partition_point(|&t| t <= t2).max(lo + 2).min(times.len());
    (lo, hi)
}

/// Default epsilon ladder for the lower-jaggedness event: dyadic fractions
/// 2^-4 .. 2^-10 of the window length.
pub fn default_epsilons(t1: f64, t2: f64) -> Vec<f64> {
    (4..=10).map(|k| (t2 - t1) * 2f64.powi(-k)).collect()
}

/// Default anchor count standing in for the dense rational anchors.
pub const DEFAULT_EVENT_ANCHORS: usize = 256;

fn dyadic_sum(values: &[f64], depth: u32, p: f64) -> f64 {
    let n = values.len() - 1;
    let cells = 1usize << depth;
    let mut sum = 0.0;
    let mut prev = values[0];
    for j in 1..=cells {
        let idx = (j * n) / cells;
        let v = values[idx];
        sum += (v - prev).abs().powf(p);
        prev = v;
    }
    sum
}

/// Indices of the greedy division through strict local extrema (optimal for
/// p = 1: it telescopes every monotone run).
fn extrema_indices(values: &[f64]) -> Vec<usize> {
    let mut idx = vec![0usize];
    let mut direction = 0i8;
    for i in 1..values.len() {
        let d = values[i] - values[i - 1];
        let s = if d > 0.0 {
            1
        } else if d < 0.0 {
            -1
        } else {
            0
        };
        if s != 0 {
            if direction != 0 && s != direction {
                idx.push(i - 1);
            }
            direction = s;
        }
    }
    idx.push(values.len() - 1);
    idx.dedup();
    idx
}

/// Estimate strong p-variation of log-price on `[t1, t2]` from below.
///
/// Every returned figure is the sum over one admissible division, hence a
/// lower bound of the sup over all divisions. The dyadic estimates are
/// nondecreasing in depth for p = 1 only; for p > 1 refinement can shrink
/// an individual sum, which is why `best` maximizes over the family.
pub fn p_variation(
    path: &PricePath,
    p: f64,
    max_depth: u32,
    t1: f64,
    t2: f64,
) -> Result<PVariation> {
    if !(p >= 1.0) {
        return Err(Error::validation("p-variation requires p >= 1"));
    }
    if !(t1 < t2) {
        return Err(Error::validation("window must satisfy t1 < t2"));
    }
    let (lo, hi) = window_indices(path, t1, t2);
    let values = &path.log_prices()[lo..hi];
    let n = values.len() - 1;
    let usable_depth = (usize::BITS - 1 - n.leading_zeros()).min(max_depth);
    let dyadic: Vec<f64> = (0..=usable_depth).map(|d| dyadic_sum(values, d, p)).collect();
    let ext_idx = extrema_indices(values);
    let extrema = ext_idx
        .windows(2)
        .map(|w| (values[w[1]] - values[w[0]]).abs().powf(p))
        .sum::<f64>();
    let best = dyadic.iter().cloned().fold(extrema, f64::max);
    Ok(PVariation { p, dyadic, extrema, best })
}

/// Per-p estimates plus the inferred variation and Hölder exponents.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationReport {
    pub estimates: Vec<PVariation>,
    /// Slope of log2(dyadic sum) per depth at each p over the fitted range;
    /// positive means the lower bounds still diverge geometrically.
    pub slopes: Vec<f64>,
    /// Estimated variation exponent, >= 1; `f64::INFINITY` when every probed
    /// p still diverges.
    pub vex: f64,
    /// 1 / vex.
    pub hurst: f64,
}

/// Estimate the variation exponent: the p at which dyadic p-variation
/// estimates switch from geometric divergence to saturation across
/// refinement depths.
///
/// A constant path reports vex = 1 by convention (its variation is zero,
/// hence finite, for every p).
pub fn vex_estimate(
    path: &PricePath,
    p_grid: &[f64],
    max_depth: u32,
    t1: f64,
    t2: f64,
) -> Result<VariationReport> {
    if p_grid.len() < 2 {
        return Err(Error::validation("vex estimation needs at least two p values"));
    }
    for w in p_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::validation("p grid must be strictly increasing"));
        }
    }
    let estimates: Vec<PVariation> = p_grid
        .iter()
        .map(|&p| p_variation(path, p, max_depth, t1, t2))
        .collect::<Result<_>>()?;

    let deepest = estimates[0].dyadic.len() as u32 - 1;
    // Fit over the deeper half of the depths: early depths carry the
    // transient of the window-scale shape.
    let fit_lo = (deepest / 2).max(1);
    let mut slopes = Vec::with_capacity(p_grid.len());
    let mut all_zero = true;
    for est in &estimates {
        let pts: Vec<(f64, f64)> = (fit_lo..=deepest)
            .filter_map(|d| {
                let v = est.dyadic[d as usize];
                (v > 0.0).then(|| (d as f64, v.log2()))
            })
            .collect();
        if pts.len() < 2 {
            slopes.push(0.0);
            continue;
        }
        all_zero = false;
        let n = pts.len() as f64;
        let mx = pts.iter().map(|q| q.0).sum::<f64>() / n;
        let my = pts.iter().map(|q| q.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|q| (q.0 - mx) * (q.0 - mx)).sum();
        slopes.push(sxy / sxx);
    }

    let vex = if all_zero {
        1.0
    } else {
        // Root of the slope curve in p, linearly interpolated; slope is
        // ~ 1 - pH in log2 units per depth for an H-rough path.
        let mut vex = f64::INFINITY;
        if slopes[0] <= 0.0 {
            vex = p_grid[0];
        } else {
            for i in 1..slopes.len() {
                if slopes[i] <= 0.0 {
                    let (p0, p1) = (p_grid[i - 1], p_grid[i]);
                    let (s0, s1) = (slopes[i - 1], slopes[i]);
                    vex = if s1 == s0 { p1 } else { p0 + (p1 - p0) * s0 / (s0 - s1) };
                    break;
                }
            }
        }
        vex.max(1.0)
    };

    Ok(VariationReport { estimates, slopes, vex, hurst: 1.0 / vex })
}

/// Two-scale pair family for the Hölder ratio scan: all adjacent fine pairs
/// plus all pairs of a coarsened subset when the window is large.
const HOLDER_COARSE_LIMIT: usize = 1 << 13;

/// Sup of `|log S(y) - log S(x)| / |y - x|^exponent` over the scanned pair
/// family on `[t1, t2]`.
pub fn holder_max_ratio(path: &PricePath, exponent: f64, t1: f64, t2: f64) -> f64 {
    let (lo, hi) = window_indices(path, t1, t2);
    let times = &path.times()[lo..hi];
    let values = &path.log_prices()[lo..hi];
    let n = times.len();
    let mut sup = 0.0f64;
    // Adjacent fine pairs capture the locally attained ratios.
    for i in 1..n {
        let r = (values[i] - values[i - 1]).abs() / (times[i] - times[i - 1]).powf(exponent);
        sup = sup.max(r);
    }
    let stride = n.div_ceil(HOLDER_COARSE_LIMIT);
    let coarse: Vec<usize> = (0..n).step_by(stride).chain([n - 1]).collect();
    for (a, &i) in coarse.iter().enumerate() {
        for &j in &coarse[a + 1..] {
            if j == i {
                continue;
            }
            let r = (values[j] - values[i]).abs() / (times[j] - times[i]).powf(exponent);
            sup = sup.max(r);
        }
    }
    sup
}

/// Membership in the upper-Hölder event: every pair ratio bounded by `c`.
pub fn in_event_upper(path: &PricePath, exponent: f64, c: f64, t1: f64, t2: f64) -> bool {
    holder_max_ratio(path, exponent, t1, t2) <= c
}

/// Membership in the lower-jaggedness event: for every epsilon in the list
/// and every anchor x, some grid point y in (x, t2] has
/// `|log S(y) - log S(x)| >= c epsilon^exponent` and pair ratio `>= c`.
pub fn in_event_lower(
    path: &PricePath,
    exponent: f64,
    c: f64,
    t1: f64,
    t2: f64,
    epsilons: &[f64],
    n_anchors: usize,
) -> bool {
    let (lo, hi) = window_indices(path, t1, t2);
    let times = &path.times()[lo..hi];
    let values = &path.log_prices()[lo..hi];
    for &eps in epsilons {
        let anchor_hi = t2 - eps;
        if anchor_hi < t1 {
            return false;
        }
        let needed = c * eps.powf(exponent);
        for a in 0..n_anchors {
            let x = t1 + (anchor_hi - t1) * a as f64 / (n_anchors.max(2) - 1) as f64;
            let lx = path.log_price_at(x);
            let start = times.partition_point(|&t| t <= x);
            let mut found = false;
            for j in start..times.len() {
                let dv = (values[j] - lx).abs();
                if dv >= needed && dv / (times[j] - x).powf(exponent) >= c {
                    found = true;
                    break;
                }
            }
            if !found {
                return false;
            }
        }
    }
    true
}

/// Membership in the bounded-range event: log-price range on `[t1, t2]` at
/// most `a` (closed inequality).
pub fn in_event_range(path: &PricePath, a: f64, t1: f64, t2: f64) -> bool {
    log_range(path, t1, t2) <= a
}

/// Max minus min of log-price over `[t1, t2]`, including the interpolated
/// window endpoints.
pub fn log_range(path: &PricePath, t1: f64, t2: f64) -> f64 {
    let (lo, hi) = window_indices(path, t1, t2);
    let mut min = path.log_price_at(t1).min(path.log_price_at(t2));
    let mut max = path.log_price_at(t1).max(path.log_price_at(t2));
    for &v in &path.log_prices()[lo..hi] {
        min = min.min(v);
        max = max.max(v);
    }
    max - min
}

/// First interpolated time in `[t1, t2]` at which `|log S(t) - log S(t1)|`
/// reaches `half_band`, if any.
pub fn band_exit_time(path: &PricePath, t1: f64, t2: f64, half_band: f64) -> Option<f64> {
    let anchor = path.log_price_at(t1);
    let up = anchor + half_band;
    let down = anchor - half_band;
    let times = path.times();
    let logs = path.log_prices();
    let mut seg = path.segment_index(t1);
    let mut cur_t = t1;
    let mut cur_l = anchor;
    while times[seg + 1] <= t1 {
        seg += 1;
    }
    loop {
        let seg_end_t = times[seg + 1].min(t2);
        let seg_end_l = if times[seg + 1] <= t2 { logs[seg + 1] } else { path.log_price_at(t2) };
        let level = if seg_end_l >= up {
            Some(up)
        } else if seg_end_l <= down {
            Some(down)
        } else {
            None
        };
        if let Some(level) = level {
            let frac = (level - cur_l) / (seg_end_l - cur_l);
            return Some((cur_t + frac * (seg_end_t - cur_t)).min(seg_end_t));
        }
        if times[seg + 1] >= t2 || seg + 2 >= times.len() {
            return None;
        }
        seg += 1;
        cur_t = times[seg];
        cur_l = logs[seg];
    }
}
