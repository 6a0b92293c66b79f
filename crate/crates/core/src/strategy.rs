//! Beta-binomial Bayesian betting for the embedded coin-tossing game.
//!
//! The predictive head probability under a Beta(alpha, beta) prior after
//! `h` heads and `t` tails is `(alpha + h) / (alpha + beta + h + t)`; the
//! associated bet is `nu = (p_hat - rho) / (rho (1 - rho))`, whose one-step
//! capital factor is `p_hat / rho` on heads and `(1 - p_hat) / (1 - rho)` on
//! tails. The whole-sequence capital has the closed form
//! `Q(x_1..x_n) / (rho^h (1 - rho)^t)` with `Q` the beta-binomial marginal
//! likelihood, evaluated through log-gamma so that astronomically large
//! capitals remain representable.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::game::BetPolicy;

/// Prior pseudo-counts of the Bayesian strategy.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BetaBinomialParams {
    pub alpha: f64,
    pub beta: f64,
}

impl BetaBinomialParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite() && beta > 0.0 && beta.is_finite()) {
            return Err(Error::validation("prior counts must be strictly positive and finite"));
        }
        Ok(BetaBinomialParams { alpha, beta })
    }

    /// Uniform prior, alpha = beta = 1.
    pub fn uniform() -> Self {
        BetaBinomialParams { alpha: 1.0, beta: 1.0 }
    }
}

/// Running outcome counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub heads: usize,
    pub tails: usize,
}

impl Counts {
    pub fn from_outcomes(outcomes: &[bool]) -> Self {
        let heads = outcomes.iter().filter(|&&x| x).count();
        Counts { heads, tails: outcomes.len() - heads }
    }

    pub fn total(&self) -> usize {
        self.heads + self.tails
    }
}

/// Bayesian predictive probability of the next head.
pub fn predictive_prob(params: &BetaBinomialParams, counts: &Counts) -> f64 {
    (params.alpha + counts.heads as f64)
        / (params.alpha + params.beta + counts.total() as f64)
}

/// Kelly-type bet from a predictive probability and the risk-neutral rho.
pub fn bet_from_prob(p_hat: f64, rho: f64) -> f64 {
    (p_hat - rho) / (rho * (1.0 - rho))
}

/// Log capital of the beta-binomial strategy after the given outcome counts,
/// by the marginal-likelihood closed form. Depends on the sequence only
/// through (h, t).
pub fn closed_form_log_capital(counts: &Counts, params: &BetaBinomialParams, rho: f64) -> f64 {
    let h = counts.heads as f64;
    let t = counts.tails as f64;
    let a = params.alpha;
    let b = params.beta;
    let log_q = ln_gamma(a + h) - ln_gamma(a) + ln_gamma(b + t) - ln_gamma(b)
        - (ln_gamma(a + b + h + t) - ln_gamma(a + b));
    log_q - h * rho.ln() - t * (1.0 - rho).ln()
}

/// Kullback–Leibler information `D(p || q)` in nats, with the convention
/// `0 log 0 = 0`. `q` must be interior.
pub fn kl(p: f64, q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::validation("kl divergence requires q strictly inside (0, 1)"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::validation("kl divergence requires p in [0, 1]"));
    }
    let term = |x: f64, y: f64| if x == 0.0 { 0.0 } else { x * (x / y).ln() };
    Ok(term(p, q) + term(1.0 - p, 1.0 - q))
}

/// Stirling approximation of the log capital: `n D(h/n || rho) - log(n)/2`.
/// Differs from the closed form by a bounded, (alpha, beta)-dependent term.
pub fn stirling_log_capital(n: usize, h: usize, rho: f64) -> Result<f64> {
    if n == 0 || h > n {
        return Err(Error::validation("stirling approximation requires 0 <= h <= n, n >= 1"));
    }
    let nf = n as f64;
    Ok(nf * kl(h as f64 / nf, rho)? - 0.5 * nf.ln())
}

/// [`BetPolicy`] wrapper around the beta-binomial rule.
#[derive(Debug, Clone, Copy)]
pub struct BetaBinomialPolicy {
    pub params: BetaBinomialParams,
}

impl BetaBinomialPolicy {
    pub fn new(params: BetaBinomialParams) -> Self {
        BetaBinomialPolicy { params }
    }
}

impl BetPolicy for BetaBinomialPolicy {
    fn bet(&self, past: &[bool], rho: f64) -> f64 {
        let counts = Counts::from_outcomes(past);
        bet_from_prob(predictive_prob(&self.params, &counts), rho)
    }
}
