//! Multi-scale game ladders and account constructions.
//!
//! A ladder runs the limit-order beta-binomial game at grids
//! `eta_1k = a1^{-k}, eta_2k = a2^{-k}` for a range of scale indices k, each
//! from independent unit capital. On top of the ladder sit the two-account
//! split (the second account enters at the first exit of the `A/2` log band,
//! guaranteeing one account sees `|L| >= A/4` whenever the path leaves the
//! `A` range band) and the dyadic ladder that puts `2^{-i}` into account i
//! and freezes the account once it has grown back to one unit.

use serde::Serialize;

use crate::analysis::{
    band_exit_time, predict_log_capital, summarize, CapitalPrediction, GameSummary,
};
use crate::error::{Error, Result};
use crate::game::{
    continuous_capital, sample_capital_curve, scan_hits_bounded, CapitalCurve, GridParams,
};
use crate::path::PricePath;
use crate::strategy::{BetaBinomialParams, BetaBinomialPolicy};

pub const DEFAULT_ROUND_BUDGET: usize = 10_000_000;
pub const DEFAULT_ACCOUNTS: usize = 8;

/// Configuration of one multi-scale experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultiScaleConfig {
    pub a1: f64,
    pub a2: f64,
    pub k_min: u32,
    pub k_max: u32,
    pub prior: BetaBinomialParams,
    /// Range threshold A of the band events.
    pub range_threshold: f64,
    /// Capital target C of the essential-forcing experiments.
    pub target_capital: f64,
    pub window: (f64, f64),
    /// Scales whose scan exceeds this many rounds are skipped with a
    /// diagnostic instead of running away.
    pub round_budget: usize,
}

impl MultiScaleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.a1 > 1.0 && self.a2 > 1.0) {
            return Err(Error::validation("scale bases must exceed 1"));
        }
        if self.k_min < 1 || self.k_min > self.k_max {
            return Err(Error::validation("need 1 <= k_min <= k_max"));
        }
        if !(self.range_threshold > 0.0 && self.target_capital > 0.0) {
            return Err(Error::validation("A and C must be positive"));
        }
        if !(self.window.0 < self.window.1) {
            return Err(Error::validation("window must satisfy T1 < T2"));
        }
        Ok(())
    }

    pub fn grid_at(&self, k: u32) -> Result<GridParams> {
        GridParams::from_etas(self.a1.powi(-(k as i32)), self.a2.powi(-(k as i32)))
    }
}

/// Result of one scale of the ladder.
#[derive(Debug, Clone, Serialize)]
pub struct ScaleRecord {
    pub k: u32,
    pub summary: Option<GameSummary>,
    /// Realized log K(T); absent when the scale was skipped.
    pub log_capital: Option<f64>,
    pub prediction: Option<CapitalPrediction>,
    /// Set when the round budget aborted this scale.
    pub skipped: Option<String>,
}

fn run_scale(path: &PricePath, cfg: &MultiScaleConfig, k: u32, start: f64) -> Result<ScaleRecord> {
    let grid = cfg.grid_at(k)?;
    let (_, t2) = cfg.window;
    let hits = match scan_hits_bounded(path, &grid, start, t2, cfg.round_budget) {
        Ok(hits) => hits,
        Err(Error::RoundBudgetExceeded { budget }) => {
            return Ok(ScaleRecord {
                k,
                summary: None,
                log_capital: None,
                prediction: None,
                skipped: Some(format!("round budget {budget} exceeded")),
            })
        }
        Err(e) => return Err(e),
    };
    let l_horizon = path.log_price_at(t2) - path.log_price_at(start);
    let summary = summarize(&hits, &grid, l_horizon);
    let policy = BetaBinomialPolicy::new(cfg.prior);
    let traj = continuous_capital(path, &hits, &policy, &grid, t2)?;
    let prediction = predict_log_capital(&summary, cfg.a1, cfg.a2, k)?;
    Ok(ScaleRecord {
        k,
        summary: Some(summary),
        log_capital: Some(traj.log_horizon_capital),
        prediction,
        skipped: None,
    })
}

/// Run the ladder of scales `k_min ..= k_max`, each from unit capital.
pub fn run_multiscale(path: &PricePath, cfg: &MultiScaleConfig) -> Result<Vec<ScaleRecord>> {
    cfg.validate()?;
    if cfg.window.1 > path.horizon() {
        return Err(Error::validation("window end beyond the sampled path"));
    }
    (cfg.k_min..=cfg.k_max)
        .map(|k| run_scale(path, cfg, k, cfg.window.0))
        .collect()
}

/// The two-account construction.
#[derive(Debug, Clone, Serialize)]
pub struct TwoAccountReport {
    /// First time `|log S(t) - log S(T1)|` reaches `A/2`, if realized.
    pub band_exit: Option<f64>,
    /// Ladder of the account entering at T1.
    pub account1: Vec<ScaleRecord>,
    /// Ladder of the account entering at the band exit; `None` when the
    /// stopping time never realizes (that account idles at its initial
    /// capital).
    pub account2: Option<Vec<ScaleRecord>>,
    /// `|log S(T) - log S(T1)|`.
    pub l_anchor1: f64,
    /// `|log S(T) - log S(t_A)|`, when the band exit realized.
    pub l_anchor2: Option<f64>,
    /// Per-k max of the two accounts' log capitals.
    pub max_log_capital: Vec<(u32, f64)>,
}

/// Split into two accounts: one trading from T1, one from the first exit of
/// the `A/2` band around the entry log-price.
pub fn two_account(path: &PricePath, cfg: &MultiScaleConfig) -> Result<TwoAccountReport> {
    cfg.validate()?;
    let (t1, t2) = cfg.window;
    let account1 = run_multiscale(path, cfg)?;
    let band_exit = band_exit_time(path, t1, t2, cfg.range_threshold / 2.0)
        .filter(|&t| t < t2);
    let account2 = band_exit
        .map(|ta| {
            (cfg.k_min..=cfg.k_max)
                .map(|k| run_scale(path, cfg, k, ta))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    let l_anchor1 = (path.log_price_at(t2) - path.log_price_at(t1)).abs();
    let l_anchor2 =
        band_exit.map(|ta| (path.log_price_at(t2) - path.log_price_at(ta)).abs());
    let max_log_capital = account1
        .iter()
        .enumerate()
        .map(|(i, r1)| {
            let k1 = r1.log_capital.unwrap_or(0.0);
            let k2 = account2
                .as_ref()
                .and_then(|a| a[i].log_capital)
                .unwrap_or(0.0);
            (r1.k, k1.max(k2))
        })
        .collect();
    Ok(TwoAccountReport {
        band_exit,
        account1,
        account2,
        l_anchor1,
        l_anchor2,
        max_log_capital,
    })
}

/// Static mixture of capital processes sharing one time axis:
/// `K(t) = sum_i c_i K_i(t)` pointwise.
pub fn mix(runs: &[CapitalCurve], weights: &[f64]) -> Result<CapitalCurve> {
    if runs.is_empty() || runs.len() != weights.len() {
        return Err(Error::validation("need one weight per run"));
    }
    if weights.iter().any(|&w| !(w >= 0.0)) {
        return Err(Error::validation("mixture weights must be nonnegative"));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::validation(format!("mixture weights sum to {total}, expected 1")));
    }
    let times = &runs[0].times;
    for run in &runs[1..] {
        if run.times != *times {
            return Err(Error::validation("mixed runs must share a time axis"));
        }
    }
    let log_capital = (0..times.len())
        .map(|i| {
            // log-sum-exp over log(c_j) + log K_j(t_i).
            let terms: Vec<f64> = runs
                .iter()
                .zip(weights)
                .filter(|(_, &w)| w > 0.0)
                .map(|(run, &w)| w.ln() + run.log_capital[i])
                .collect();
            let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if m == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                m + terms.iter().map(|&t| (t - m).exp()).sum::<f64>().ln()
            }
        })
        .collect();
    Ok(CapitalCurve { times: times.clone(), log_capital })
}

/// One account of the dyadic ladder.
#[derive(Debug, Clone, Serialize)]
pub struct AccountRecord {
    /// 1-based account index i; initial capital 2^{-i}, target 2^i.
    pub index: usize,
    pub scale_k: u32,
    pub initial_capital: f64,
    /// First time the account's capital reached one unit, if ever.
    pub frozen_at: Option<f64>,
    /// Ledger contribution at the horizon: exactly 1 when frozen, else
    /// initial * K_i(T).
    pub final_contribution: f64,
    /// Log of the account's unfrozen capital process at the horizon.
    pub final_log_capital: f64,
    pub skipped: Option<String>,
}

/// The dyadic ladder run.
#[derive(Debug, Clone, Serialize)]
pub struct LadderReport {
    pub accounts: Vec<AccountRecord>,
    pub frozen_count: usize,
    /// Ledger total over time on the shared sample axis.
    pub ledger: CapitalCurve,
}

/// Truncated countable mixture: account i starts with `2^{-i}`, plays the
/// scale `k_min + i - 1` game and freezes (collects one unit) at the first
/// sampled time its capital reaches one.
pub fn dyadic_ladder(
    path: &PricePath,
    cfg: &MultiScaleConfig,
    n_accounts: usize,
) -> Result<LadderReport> {
    cfg.validate()?;
    if n_accounts == 0 {
        return Err(Error::validation("need at least one account"));
    }
    let (t1, t2) = cfg.window;
    let policy = BetaBinomialPolicy::new(cfg.prior);

    let axis: Vec<f64> = {
        let mut ts: Vec<f64> = path
            .times()
            .iter()
            .copied()
            .filter(|&t| t >= t1 && t <= t2)
            .chain([t1, t2])
            .collect();
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup();
        ts
    };

    let mut accounts = Vec::with_capacity(n_accounts);
    let mut contributions: Vec<Vec<f64>> = Vec::with_capacity(n_accounts);
    for i in 1..=n_accounts {
        let k = cfg.k_min + (i as u32 - 1);
        let initial = 2f64.powi(-(i as i32));
        let log_initial = initial.ln();
        let grid = cfg.grid_at(k)?;
        let scanned = scan_hits_bounded(path, &grid, t1, t2, cfg.round_budget);
        let (record, contrib) = match scanned {
            Ok(hits) => {
                let traj = continuous_capital(path, &hits, &policy, &grid, t2)?;
                let curve = sample_capital_curve(path, &hits, &traj, &grid, t1, t2);
                // Freeze at the first sampled time the account is back to 1.
                let frozen_at = curve
                    .times
                    .iter()
                    .zip(&curve.log_capital)
                    .find(|(_, &lk)| log_initial + lk >= 0.0)
                    .map(|(&t, _)| t);
                // Contribution on the shared axis.
                let mut contrib = Vec::with_capacity(axis.len());
                let mut j = 0usize;
                for &t in &axis {
                    while j + 1 < curve.times.len() && curve.times[j + 1] <= t {
                        j += 1;
                    }
                    let c = match frozen_at {
                        Some(tf) if t >= tf => 1.0,
                        _ => initial * curve.log_capital[j].exp(),
                    };
                    contrib.push(c);
                }
                (
                    AccountRecord {
                        index: i,
                        scale_k: k,
                        initial_capital: initial,
                        frozen_at,
                        final_contribution: *contrib.last().unwrap(),
                        final_log_capital: traj.log_horizon_capital,
                        skipped: None,
                    },
                    contrib,
                )
            }
            Err(Error::RoundBudgetExceeded { budget }) => (
                AccountRecord {
                    index: i,
                    scale_k: k,
                    initial_capital: initial,
                    frozen_at: None,
                    final_contribution: initial,
                    final_log_capital: 0.0,
                    skipped: Some(format!("round budget {budget} exceeded")),
                },
                vec![initial; axis.len()],
            ),
            Err(e) => return Err(e),
        };
        accounts.push(record);
        contributions.push(contrib);
    }

    let totals: Vec<f64> = (0..axis.len())
        .map(|j| contributions.iter().map(|c| c[j]).sum::<f64>().ln())
        .collect();
    let frozen_count = accounts.iter().filter(|a| a.frozen_at.is_some()).count();
    Ok(LadderReport {
        accounts,
        frozen_count,
        ledger: CapitalCurve { times: axis, log_capital: totals },
    })
}
