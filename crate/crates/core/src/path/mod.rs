//! Price path generation.
//!
//! A path is a sampled positive continuous price function, stored as
//! log-prices on a strictly increasing time grid and interpreted
//! piecewise-linearly in log space. Linear log segments keep multiplicative
//! level crossings solvable in closed form, which the hit scanner relies on.

mod fbm;
mod io;

pub use io::{read_path, read_path_from, write_path, write_path_to};

use crate::error::{Error, Result};

/// A sampled positive continuous price path.
///
/// Immutable after construction; between grid points the path is the linear
/// interpolant of log-price.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePath {
    times: Vec<f64>,
    log_prices: Vec<f64>,
}

impl PricePath {
    /// Validates and wraps a sampled path. Requires at least two points,
    /// strictly increasing times starting at 0 and finite log-prices.
    pub fn new(times: Vec<f64>, log_prices: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::validation("path needs at least 2 grid points"));
        }
        if times.len() != log_prices.len() {
            return Err(Error::validation("times and log_prices length mismatch"));
        }
        if times[0] != 0.0 {
            return Err(Error::validation("time grid must start at 0"));
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::validation("time grid must be strictly increasing"));
            }
        }
        if log_prices.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("log-prices must be finite"));
        }
        // Snap every log-price to the nearest value in the image of ln
        // (a change of at most one ulp). This makes the stored logs exactly
        // representable through the two-column price file, so serialization
        // round-trips bit-for-bit.
        let log_prices = log_prices
            .into_iter()
            .map(|lp| io::price_for_log(lp).ln())
            .collect();
        Ok(PricePath { times, log_prices })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn log_prices(&self) -> &[f64] {
        &self.log_prices
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Index of the last grid point with `times[i] <= t`.
    pub fn segment_index(&self, t: f64) -> usize {
        match self
            .times
            .binary_search_by(|x| x.partial_cmp(&t).unwrap())
        {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        }
        .min(self.times.len() - 2)
    }

    /// Log-price at time `t` by linear interpolation. `t` must lie within
    /// the sampled horizon.
    pub fn log_price_at(&self, t: f64) -> f64 {
        let i = self.segment_index(t);
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let (l0, l1) = (self.log_prices[i], self.log_prices[i + 1]);
        if t <= t0 {
            l0
        } else if t >= t1 {
            l1
        } else {
            l0 + (l1 - l0) * (t - t0) / (t1 - t0)
        }
    }

    pub fn price_at(&self, t: f64) -> f64 {
        self.log_price_at(t).exp()
    }

    /// Net log move over the whole sample.
    pub fn net_log_move(&self) -> f64 {
        self.log_prices[self.log_prices.len() - 1] - self.log_prices[0]
    }
}

/// Path family selector with kind-specific parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PathKind {
    Fbm,
    Constant,
    LogLinear { slope: f64 },
    Sinusoid { amplitude: f64, frequency: f64 },
    Weierstrass { base: f64, holder: f64 },
}

/// Full recipe for one generated path. Generators are pure functions of the
/// spec: same spec (seed included) gives a bit-identical path.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PathSpec {
    pub kind: PathKind,
    /// Hurst exponent of the fBm driver, in (0, 1).
    pub hurst: f64,
    /// Volatility multiplier on the fBm driver, >= 0.
    pub volatility: f64,
    /// Horizon T > 0; the grid covers [0, T].
    pub horizon: f64,
    pub n_points: usize,
    pub initial_price: f64,
    pub seed: u64,
}

impl PathSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.hurst > 0.0 && self.hurst < 1.0) {
            return Err(Error::validation("hurst must be in (0, 1)"));
        }
        if self.n_points < 2 {
            return Err(Error::validation("n_points must be at least 2"));
        }
        if !(self.horizon > 0.0) {
            return Err(Error::validation("horizon must be positive"));
        }
        if !(self.initial_price > 0.0 && self.initial_price.is_finite()) {
            return Err(Error::validation("initial price must be positive"));
        }
        if !(self.volatility >= 0.0) {
            return Err(Error::validation("volatility must be nonnegative"));
        }
        match self.kind {
            PathKind::Weierstrass { base, holder } => {
                if !(base > 1.0) {
                    return Err(Error::validation("weierstrass base must exceed 1"));
                }
                if !(holder > 0.0 && holder < 1.0) {
                    return Err(Error::validation("weierstrass holder target must be in (0, 1)"));
                }
            }
            PathKind::Sinusoid { frequency, .. } => {
                if !(frequency > 0.0) {
                    return Err(Error::validation("sinusoid frequency must be positive"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn uniform_grid(&self) -> Vec<f64> {
        let n = self.n_points;
        let dt = self.horizon / (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.horizon
                } else {
                    i as f64 * dt
                }
            })
            .collect()
    }
}

/// Generate a path from any spec kind.
pub fn generate(spec: &PathSpec) -> Result<PricePath> {
    match spec.kind {
        PathKind::Fbm => gen_fbm(spec),
        _ => gen_deterministic(spec),
    }
}

/// Sample `log S(t) = log S(0) + sigma * B_H(t)` exactly on the grid, where
/// `B_H` is fractional Brownian motion with Hurst exponent `spec.hurst`.
pub fn gen_fbm(spec: &PathSpec) -> Result<PricePath> {
    spec.validate()?;
    if spec.kind != PathKind::Fbm {
        return Err(Error::validation("gen_fbm requires kind = fbm"));
    }
    let times = spec.uniform_grid();
    let n_incr = spec.n_points - 1;
    let dt = spec.horizon / n_incr as f64;
    let log0 = spec.initial_price.ln();
    let mut log_prices = Vec::with_capacity(spec.n_points);
    log_prices.push(log0);
    if spec.volatility == 0.0 {
        log_prices.resize(spec.n_points, log0);
    } else {
        let fgn = fbm::fractional_gaussian_noise(spec.hurst, n_incr, spec.seed)?;
        // Unit-spacing fGn rescales to step dt by self-similarity.
        let scale = spec.volatility * dt.powf(spec.hurst);
        let mut acc = log0;
        for z in fgn {
            acc += scale * z;
            log_prices.push(acc);
        }
    }
    PricePath::new(times, log_prices)
}

/// Generate one of the deterministic fixture families.
pub fn gen_deterministic(spec: &PathSpec) -> Result<PricePath> {
    spec.validate()?;
    let times = spec.uniform_grid();
    let log0 = spec.initial_price.ln();
    let log_prices: Vec<f64> = match spec.kind {
        PathKind::Constant => times.iter().map(|_| log0).collect(),
        PathKind::LogLinear { slope } => times.iter().map(|&t| log0 + slope * t).collect(),
        PathKind::Sinusoid { amplitude, frequency } => times
            .iter()
            .map(|&t| log0 + amplitude * (2.0 * std::f64::consts::PI * frequency * t).sin())
            .collect(),
        PathKind::Weierstrass { base, holder } => {
            // Truncate once the term amplitude b^{-hJ} drops below the grid
            // resolution; finer terms cannot register on the sample.
            let dt = spec.horizon / (spec.n_points - 1) as f64;
            let n_terms = ((1.0 / dt).ln() / (holder * base.ln())).ceil().max(0.0) as u32 + 1;
            times
                .iter()
                .map(|&t| {
                    let mut acc = log0;
                    for j in 0..n_terms {
                        let bj = base.powi(j as i32);
                        acc += bj.powf(-holder) * (bj * t).cos();
                    }
                    acc
                })
                .collect()
        }
        PathKind::Fbm => return Err(Error::validation("gen_deterministic cannot build fbm")),
    };
    PricePath::new(times, log_prices)
}
