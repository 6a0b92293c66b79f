//! The limit-order trading game and its embedded coin-tossing game.
//!
//! The scanner walks a piecewise-log-linear path and records the first
//! crossing of the multiplicative up boundary `(1 + delta1) S(t_i)` or down
//! boundary `S(t_i) / (1 + delta2)` after each trade time. Each crossing is
//! one round of an embedded binary game with risk-neutral head probability
//! `rho = delta2 / (delta1 + delta2 + delta1 delta2)`; round capital follows
//! `K_n = K_{n-1} (1 + nu_n (x_n - rho))` and all capital arithmetic is kept
//! in log space so that exponentially growing runs do not overflow.
//!
//! Indexing convention: round `n`'s bet `nu_n` is decided from outcomes
//! `x_1..x_{n-1}` and the position is held on `[t_{n-1}, t_n)`, with `t_0`
//! the entry time and `K_n = K(t_n)`.

use crate::error::{Error, Result};
use crate::path::PricePath;

/// Relative tolerance when matching a realized price ratio to a boundary.
pub const OUTCOME_RATIO_TOLERANCE: f64 = 1e-9;

/// Multiplicative up/down thresholds of the limit-order scheme.
///
/// Stores the log-scale widths `eta_i = log(1 + delta_i)`; the deltas are
/// derived so the pair is always exactly consistent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    eta1: f64,
    eta2: f64,
}

impl GridParams {
    pub fn from_deltas(delta1: f64, delta2: f64) -> Result<Self> {
        if !(delta1 > 0.0 && delta1.is_finite()) || !(delta2 > 0.0 && delta2.is_finite()) {
            return Err(Error::validation("grid deltas must be strictly positive"));
        }
        Ok(GridParams { eta1: delta1.ln_1p(), eta2: delta2.ln_1p() })
    }

    pub fn from_etas(eta1: f64, eta2: f64) -> Result<Self> {
        if !(eta1 > 0.0 && eta1.is_finite()) || !(eta2 > 0.0 && eta2.is_finite()) {
            return Err(Error::validation("grid etas must be strictly positive"));
        }
        Ok(GridParams { eta1, eta2 })
    }

    pub fn eta1(&self) -> f64 {
        self.eta1
    }

    pub fn eta2(&self) -> f64 {
        self.eta2
    }

    pub fn delta1(&self) -> f64 {
        self.eta1.exp_m1()
    }

    pub fn delta2(&self) -> f64 {
        self.eta2.exp_m1()
    }

    /// Head probability making the one-round multiplicative bet fair:
    /// `1 = rho (1 + delta1) + (1 - rho) / (1 + delta2)`.
    pub fn risk_neutral_rho(&self) -> f64 {
        let d1 = self.delta1();
        let d2 = self.delta2();
        d2 / (d1 + d2 + d1 * d2)
    }

    /// Conversion factor between the coin-game bet `nu` and the asset
    /// position fraction `theta`: `theta = (1 + delta2) / (d1 + d2 + d1 d2) * nu`.
    pub fn theta_per_nu(&self) -> f64 {
        let d1 = self.delta1();
        let d2 = self.delta2();
        (1.0 + d2) / (d1 + d2 + d1 * d2)
    }
}

/// One realized corridor exit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub time: f64,
    /// true for the up boundary (x = 1), false for the down boundary (x = 0).
    pub outcome: bool,
    /// Log-price at the hit; exactly the boundary level by construction.
    pub log_price: f64,
}

/// Realized stopping times and outcomes of one scanned window.
#[derive(Debug, Clone, PartialEq)]
pub struct HitSequence {
    pub start_time: f64,
    pub end_time: f64,
    /// Log-price at the entry time `t_0 = start_time`.
    pub entry_log_price: f64,
    pub hits: Vec<Hit>,
}

impl HitSequence {
    /// Number of completed rounds `n*`.
    pub fn n_star(&self) -> usize {
        self.hits.len()
    }

    /// (heads, tails) outcome counts.
    pub fn counts(&self) -> (usize, usize) {
        let h = self.hits.iter().filter(|hit| hit.outcome).count();
        (h, self.hits.len() - h)
    }

    pub fn outcomes(&self) -> Vec<bool> {
        self.hits.iter().map(|h| h.outcome).collect()
    }

    /// Trade times including the entry time `t_0`.
    pub fn trade_times(&self) -> Vec<f64> {
        std::iter::once(self.start_time)
            .chain(self.hits.iter().map(|h| h.time))
            .collect()
    }

    /// Log-price at trade time `i` (0 = entry).
    pub fn log_price_at_round(&self, i: usize) -> f64 {
        if i == 0 {
            self.entry_log_price
        } else {
            self.hits[i - 1].log_price
        }
    }
}

/// Scan `[t1, t2]` of `path` for corridor exits of `grid`.
///
/// Each returned hit time is the earliest interpolated time after the
/// previous hit at which log-price reaches the up level `+eta1` or down
/// level `-eta2` relative to the previous hit; the recorded log-price is the
/// boundary level itself. A crossing exactly at `t2` counts as completed.
pub fn scan_hits(path: &PricePath, grid: &GridParams, t1: f64, t2: f64) -> Result<HitSequence> {
    scan_hits_bounded(path, grid, t1, t2, usize::MAX)
}

/// As [`scan_hits`], aborting with [`Error::RoundBudgetExceeded`] once more
/// than `max_rounds` hits accumulate.
pub fn scan_hits_bounded(
    path: &PricePath,
    grid: &GridParams,
    t1: f64,
    t2: f64,
    max_rounds: usize,
) -> Result<HitSequence> {
    if !(t1 < t2) {
        return Err(Error::validation("scan window must satisfy t1 < t2"));
    }
    if t1 < 0.0 || t2 > path.horizon() {
        return Err(Error::validation("scan window must lie within the path horizon"));
    }

    let entry_log = path.log_price_at(t1);
    let mut hits = Vec::new();

    let mut ref_log = entry_log;
    let mut up = ref_log + grid.eta1;
    let mut down = ref_log - grid.eta2;

    let times = path.times();
    let logs = path.log_prices();
    let mut seg = path.segment_index(t1);
    // Current position along the path, always strictly inside the corridor.
    let mut cur_t = t1;
    let mut cur_l = entry_log;

    while times[seg + 1] <= t1 {
        seg += 1;
    }

    loop {
        let seg_end_t = times[seg + 1].min(t2);
        let seg_end_l = if times[seg + 1] <= t2 {
            logs[seg + 1]
        } else {
            path.log_price_at(t2)
        };

        // Within one linear segment only the boundary in the direction of
        // motion can be hit; resolve repeated crossings inside the segment.
        loop {
            let crossed = if seg_end_l >= up {
                Some((up, true))
            } else if seg_end_l <= down {
                Some((down, false))
            } else {
                None
            };
            match crossed {
                Some((level, outcome)) => {
                    let frac = (level - cur_l) / (seg_end_l - cur_l);
                    let hit_t = (cur_t + frac * (seg_end_t - cur_t)).min(seg_end_t);
                    hits.push(Hit { time: hit_t, outcome, log_price: level });
                    if hits.len() > max_rounds {
                        return Err(Error::RoundBudgetExceeded { budget: max_rounds });
                    }
                    ref_log = level;
                    up = ref_log + grid.eta1;
                    down = ref_log - grid.eta2;
                    cur_t = hit_t;
                    cur_l = level;
                    if cur_t >= seg_end_t {
                        break;
                    }
                }
                None => break,
            }
        }

        if times[seg + 1] >= t2 {
            break;
        }
        seg += 1;
        cur_t = times[seg];
        cur_l = logs[seg];
        if seg + 1 >= times.len() {
            break;
        }
    }

    Ok(HitSequence { start_time: t1, end_time: t2, entry_log_price: entry_log, hits })
}

/// Classify a realized price ratio as an up (1) or down (0) boundary exit.
///
/// Fails with [`Error::InconsistentOutcome`] when the ratio matches neither
/// boundary within [`OUTCOME_RATIO_TOLERANCE`]; that signals a scanner bug
/// or corrupted input rather than a market condition.
pub fn encode_outcome(s_prev: f64, s_next: f64, grid: &GridParams) -> Result<bool> {
    let ratio = s_next / s_prev;
    let up = 1.0 + grid.delta1();
    let down = 1.0 / (1.0 + grid.delta2());
    if (ratio / up - 1.0).abs() < OUTCOME_RATIO_TOLERANCE {
        Ok(true)
    } else if (ratio / down - 1.0).abs() < OUTCOME_RATIO_TOLERANCE {
        Ok(false)
    } else {
        Err(Error::InconsistentOutcome {
            ratio,
            delta1: grid.delta1(),
            delta2: grid.delta2(),
        })
    }
}

/// A per-round bet provider. `past` carries the outcomes observed so far;
/// the returned bet may depend on nothing else.
pub trait BetPolicy {
    fn bet(&self, past: &[bool], rho: f64) -> f64;
}

impl<F: Fn(&[bool], f64) -> f64> BetPolicy for F {
    fn bet(&self, past: &[bool], rho: f64) -> f64 {
        self(past, rho)
    }
}

/// Zero bet at every round.
pub struct NoBet;

impl BetPolicy for NoBet {
    fn bet(&self, _past: &[bool], _rho: f64) -> f64 {
        0.0
    }
}

/// Capital of the embedded game and, when built through
/// [`continuous_capital`], of the continuous-time process at the horizon.
///
/// All capitals are stored as natural logs; a ruined round is `-inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct CapitalTrajectory {
    /// `log K_0 .. log K_{n*}` of the embedded recursion (`log K_0 = 0`).
    pub log_round_capitals: Vec<f64>,
    /// Bets `nu_1 .. nu_{n*}`.
    pub bets: Vec<f64>,
    /// Bet of the open round `n* + 1`, when a horizon position exists.
    pub open_bet: Option<f64>,
    /// `log K(T)` including the open-position factor; equals the last round
    /// capital when no position is open.
    pub log_horizon_capital: f64,
}

impl CapitalTrajectory {
    pub fn log_final_round_capital(&self) -> f64 {
        *self.log_round_capitals.last().unwrap()
    }
}

fn bet_window(rho: f64) -> (f64, f64) {
    (-1.0 / (1.0 - rho), 1.0 / rho)
}

fn apply_round(log_k: f64, nu: f64, outcome: bool, rho: f64) -> Result<f64> {
    let (lo, hi) = bet_window(rho);
    if !(nu >= lo && nu <= hi) {
        return Err(Error::CollateralViolation { bet: nu, lo, hi });
    }
    let x = if outcome { 1.0 } else { 0.0 };
    let factor = 1.0 + nu * (x - rho);
    // factor >= 0 is implied by the window; 0 is the ruin boundary.
    Ok(log_k + factor.ln())
}

/// Run the embedded coin-tossing recursion over a realized hit sequence.
pub fn run_embedded_game(
    hits: &HitSequence,
    policy: &dyn BetPolicy,
    rho: f64,
) -> Result<CapitalTrajectory> {
    let outcomes = hits.outcomes();
    let mut log_round_capitals = Vec::with_capacity(outcomes.len() + 1);
    let mut bets = Vec::with_capacity(outcomes.len());
    let mut log_k = 0.0;
    log_round_capitals.push(log_k);
    for n in 0..outcomes.len() {
        let nu = policy.bet(&outcomes[..n], rho);
        log_k = apply_round(log_k, nu, outcomes[n], rho)?;
        bets.push(nu);
        log_round_capitals.push(log_k);
    }
    Ok(CapitalTrajectory {
        log_round_capitals,
        bets,
        open_bet: None,
        log_horizon_capital: log_k,
    })
}

/// Continuous-time capital bookkeeping: the embedded recursion plus the
/// open-position factor `1 + theta (S(T) - S(t_{n*})) / S(t_{n*})` at the
/// horizon.
pub fn continuous_capital(
    path: &PricePath,
    hits: &HitSequence,
    policy: &dyn BetPolicy,
    grid: &GridParams,
    horizon: f64,
) -> Result<CapitalTrajectory> {
    if horizon > path.horizon() {
        return Err(Error::validation("horizon beyond the sampled path"));
    }
    let rho = grid.risk_neutral_rho();
    let mut traj = run_embedded_game(hits, policy, rho)?;
    let outcomes = hits.outcomes();
    let open_nu = policy.bet(&outcomes, rho);
    let (lo, hi) = bet_window(rho);
    if !(open_nu >= lo && open_nu <= hi) {
        return Err(Error::CollateralViolation { bet: open_nu, lo, hi });
    }
    let theta = grid.theta_per_nu() * open_nu;
    let last_log_s = hits.log_price_at_round(hits.n_star());
    let ret = (path.log_price_at(horizon) - last_log_s).exp_m1();
    let open_factor = 1.0 + theta * ret;
    traj.open_bet = Some(open_nu);
    traj.log_horizon_capital = traj.log_final_round_capital() + open_factor.ln();
    Ok(traj)
}

/// A capital process sampled in time, in log space.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CapitalCurve {
    pub times: Vec<f64>,
    pub log_capital: Vec<f64>,
}

/// Sample the continuous capital process on the path grid restricted to
/// `[t1, t2]`, plus every trade time. Capital between trades follows the
/// held position through the interpolated price.
pub fn sample_capital_curve(
    path: &PricePath,
    hits: &HitSequence,
    traj: &CapitalTrajectory,
    grid: &GridParams,
    t1: f64,
    t2: f64,
) -> CapitalCurve {
    let mut sample_times: Vec<f64> = path
        .times()
        .iter()
        .copied()
        .filter(|&t| t >= t1 && t <= t2)
        .chain(hits.hits.iter().map(|h| h.time))
        .chain([t1, t2])
        .collect();
    sample_times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sample_times.dedup();

    let theta_per_nu = grid.theta_per_nu();
    let trade_times = hits.trade_times();
    let mut round = 0usize; // position held on [trade_times[round], next)
    let mut times = Vec::with_capacity(sample_times.len());
    let mut log_capital = Vec::with_capacity(sample_times.len());
    for &t in &sample_times {
        while round + 1 < trade_times.len() && trade_times[round + 1] <= t {
            round += 1;
        }
        let nu = if round < traj.bets.len() {
            traj.bets[round]
        } else {
            traj.open_bet.unwrap_or(0.0)
        };
        let theta = theta_per_nu * nu;
        let anchor_log_s = hits.log_price_at_round(round);
        let ret = (path.log_price_at(t) - anchor_log_s).exp_m1();
        let factor = (1.0 + theta * ret).max(0.0);
        times.push(t);
        log_capital.push(traj.log_round_capitals[round] + factor.ln());
    }
    CapitalCurve { times, log_capital }
}

#[cfg(test)]
mod tests;
