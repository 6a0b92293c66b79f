//! Core library for the limit-order trading game and its path-roughness
//! analysis toolkit.
//!
//! The pieces fit together as a pipeline:
//!
//! 1. [`path`] — sample-path models (fractional Brownian motion via circulant
//!    embedding, plus deterministic fixtures) and the `time,price` file
//!    format.
//! 2. [`game`] — the limit-order scanner that turns a continuous path into a
//!    coin-tossing game, and the capital bookkeeping of a betting policy
//!    played on those coins.
//! 3. [`strategy`] — the beta-binomial Bayesian bettor with its closed-form
//!    capital and the information-theoretic growth formulas.
//! 4. [`analysis`] — game summaries, capital growth predictions,
//!    p-variation / variation-exponent estimation, and jaggedness events.
//! 5. [`forcing`] — multi-scale ladders, the two-account split, mixtures,
//!    and the dyadic ladder.

pub mod analysis;
pub mod error;
pub mod forcing;
pub mod game;
pub mod path;
pub mod strategy;

pub use analysis::{
    band_exit_time, default_epsilons, in_event_lower, in_event_range, in_event_upper, log_range,
    p_variation, predict_log_capital, summarize, vex_estimate, CapitalPrediction, GameSummary,
    PVariation, Regime, VariationReport,
};
pub use error::{Error, Result};
pub use forcing::{
    dyadic_ladder, mix, run_multiscale, two_account, AccountRecord, LadderReport,
    MultiScaleConfig, ScaleRecord, TwoAccountReport, DEFAULT_ACCOUNTS, DEFAULT_ROUND_BUDGET,
};
pub use game::{
    continuous_capital, run_embedded_game, sample_capital_curve, scan_hits, scan_hits_bounded,
    BetPolicy, CapitalCurve, CapitalTrajectory, GridParams, Hit, HitSequence,
};
pub use path::{
    generate, read_path, read_path_from, write_path, write_path_to, PathKind, PathSpec, PricePath,
};
pub use strategy::{
    closed_form_log_capital, kl, stirling_log_capital, BetaBinomialParams, BetaBinomialPolicy,
    Counts,
};
