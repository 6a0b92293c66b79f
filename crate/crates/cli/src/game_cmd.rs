//! `game run`: one path, one grid, the beta-binomial bettor.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde::Serialize;
use vexforce_core::analysis::{predict_log_capital, summarize, CapitalPrediction, GameSummary};
use vexforce_core::game::{continuous_capital, scan_hits, GridParams, HitSequence};
use vexforce_core::path::read_path;
use vexforce_core::strategy::{BetaBinomialParams, BetaBinomialPolicy};

use crate::invalid;
use crate::out::{fmt_f64, provenance, write_atomic, write_json, Provenance};

#[derive(Subcommand)]
pub enum GameCmd {
    /// Scan hits on a path file and run the embedded game
    Run(RunArgs),
}

#[derive(Args, Serialize)]
pub struct RunArgs {
    /// Input path file (time,price)
    #[arg(long)]
    pub path: PathBuf,
    /// Upper boundary offset delta_1 (sell at (1+delta_1) S)
    #[arg(long)]
    pub delta1: f64,
    /// Lower boundary offset delta_2 (buy back at S/(1+delta_2))
    #[arg(long)]
    pub delta2: f64,
    /// Beta prior pseudo-count of up moves
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Beta prior pseudo-count of down moves
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Window start T1
    #[arg(long, default_value_t = 0.0)]
    pub from: f64,
    /// Window end T2 (default: path horizon)
    #[arg(long)]
    pub to: Option<f64>,
    /// Scale decomposition eta_i = a_i^{-k} used for the regime prediction;
    /// defaults to k = 1, a_i = 1/eta_i
    #[arg(long)]
    pub a1: Option<f64>,
    #[arg(long)]
    pub a2: Option<f64>,
    #[arg(long)]
    pub k: Option<u32>,
    /// Structured report output
    #[arg(long)]
    pub out: PathBuf,
    /// Optional hit table output (round,time,outcome,log_price)
    #[arg(long)]
    pub hits_out: Option<PathBuf>,
}

#[derive(Serialize)]
struct HitRow {
    round: usize,
    time: f64,
    outcome: u8,
    log_price: f64,
}

#[derive(Serialize)]
struct GameReport<'a> {
    provenance: Provenance,
    config: &'a RunArgs,
    window: (f64, f64),
    eta1: f64,
    eta2: f64,
    rho: f64,
    summary: GameSummary,
    /// log K-tilde at the last completed round.
    log_round_capital: f64,
    /// log K(T) including the open-position factor.
    log_horizon_capital: f64,
    prediction: Option<CapitalPrediction>,
    hits: Vec<HitRow>,
}

fn hit_rows(hits: &HitSequence) -> Vec<HitRow> {
    hits.hits
        .iter()
        .enumerate()
        .map(|(i, h)| HitRow {
            round: i + 1,
            time: h.time,
            outcome: h.outcome as u8,
            log_price: h.log_price,
        })
        .collect()
}

fn hits_csv(rows: &[HitRow]) -> String {
    let mut body = String::from("round,time,outcome,log_price\n");
    for r in rows {
        body.push_str(&format!(
            "{},{},{},{}\n",
            r.round,
            fmt_f64(r.time),
            r.outcome,
            fmt_f64(r.log_price)
        ));
    }
    body
}

pub fn run(args: &RunArgs) -> anyhow::Result<()> {
    let path = read_path(&args.path)?;
    let grid = GridParams::from_deltas(args.delta1, args.delta2)?;
    let prior = BetaBinomialParams::new(args.alpha, args.beta)?;
    let t1 = args.from;
    let t2 = args.to.unwrap_or_else(|| path.horizon());
    if !(t1 < t2) {
        return Err(invalid("window must satisfy --from < --to"));
    }

    let hits = scan_hits(&path, &grid, t1, t2)?;
    let policy = BetaBinomialPolicy::new(prior);
    let traj = continuous_capital(&path, &hits, &policy, &grid, t2)?;
    let l_horizon = path.log_price_at(t2) - path.log_price_at(t1);
    let summary = summarize(&hits, &grid, l_horizon);

    // Regime prediction needs eta_i = a_i^{-k}; without explicit flags use
    // the k = 1 decomposition, valid whenever eta_i < 1.
    let (a1, a2, k) = match (args.a1, args.a2, args.k) {
        (Some(a1), Some(a2), Some(k)) => (a1, a2, k),
        (None, None, None) => (1.0 / grid.eta1(), 1.0 / grid.eta2(), 1),
        _ => return Err(invalid("pass all of --a1 --a2 --k or none")),
    };
    let prediction = if a1 > 1.0 && a2 > 1.0 {
        predict_log_capital(&summary, a1, a2, k)?
    } else {
        None
    };

    let rows = hit_rows(&hits);
    let report = GameReport {
        provenance: provenance(args, vec![])?,
        config: args,
        window: (t1, t2),
        eta1: grid.eta1(),
        eta2: grid.eta2(),
        rho: grid.risk_neutral_rho(),
        summary,
        log_round_capital: traj.log_final_round_capital(),
        log_horizon_capital: traj.log_horizon_capital,
        prediction,
        hits: rows,
    };
    write_json(&args.out, &report)?;
    if let Some(hits_out) = &args.hits_out {
        write_atomic(hits_out, hits_csv(&report.hits).as_bytes())?;
    }
    Ok(())
}
