//! `force run`: multi-scale ladder, two-account split, and dyadic ladder on
//! one path file.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde::{Deserialize, Serialize};
use vexforce_core::forcing::{
    dyadic_ladder, run_multiscale, two_account, LadderReport, MultiScaleConfig, ScaleRecord,
    TwoAccountReport, DEFAULT_ACCOUNTS, DEFAULT_ROUND_BUDGET,
};
use vexforce_core::path::read_path;
use vexforce_core::strategy::BetaBinomialParams;

use crate::invalid;
use crate::out::{provenance, write_json, Provenance};

#[derive(Subcommand)]
pub enum ForceCmd {
    /// Run the forcing constructions on a path file
    Run(ForceArgs),
}

#[derive(Args)]
pub struct ForceArgs {
    /// Input path file (time,price)
    #[arg(long)]
    pub path: PathBuf,
    /// TOML config file; command-line flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub a1: Option<f64>,
    #[arg(long)]
    pub a2: Option<f64>,
    #[arg(long)]
    pub kmin: Option<u32>,
    #[arg(long)]
    pub kmax: Option<u32>,
    /// Range threshold A of the band events
    #[arg(long, name = "A")]
    pub range: Option<f64>,
    /// Capital target C
    #[arg(long, name = "C")]
    pub target: Option<f64>,
    /// Dyadic-ladder account count
    #[arg(long)]
    pub accounts: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub from: Option<f64>,
    /// Window end T2 (default: path horizon)
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long)]
    pub budget: Option<usize>,
    /// Structured report output
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForceFile {
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    pub k_min: Option<u32>,
    pub k_max: Option<u32>,
    pub range_threshold: Option<f64>,
    pub target_capital: Option<f64>,
    pub accounts: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub round_budget: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedForce {
    pub a1: f64,
    pub a2: f64,
    pub k_min: u32,
    pub k_max: u32,
    pub range_threshold: f64,
    pub target_capital: f64,
    pub accounts: usize,
    pub alpha: f64,
    pub beta: f64,
    pub window: (f64, f64),
    pub round_budget: usize,
}

fn load_file(path: &Option<PathBuf>) -> anyhow::Result<ForceFile> {
    match path {
        None => Ok(ForceFile::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| invalid(format!("reading config {}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| invalid(format!("parsing {}: {e}", p.display())))
        }
    }
}

#[derive(Serialize)]
struct ForceReport {
    provenance: Provenance,
    config: ResolvedForce,
    scales: Vec<ScaleRecord>,
    two_account: TwoAccountReport,
    ladder: LadderSummary,
}

/// The ledger curve itself can span millions of samples; the report keeps
/// the per-account records plus endpoint statistics of the total.
#[derive(Serialize)]
struct LadderSummary {
    accounts: Vec<vexforce_core::forcing::AccountRecord>,
    frozen_count: usize,
    ledger_initial: f64,
    ledger_final: f64,
    ledger_max: f64,
    /// Whether the ledger total ever reached the capital target C.
    target_reached: bool,
}

fn summarize_ladder(report: LadderReport, target: f64) -> LadderSummary {
    let totals: Vec<f64> = report.ledger.log_capital.iter().map(|lk| lk.exp()).collect();
    let max = totals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    LadderSummary {
        frozen_count: report.frozen_count,
        ledger_initial: *totals.first().unwrap(),
        ledger_final: *totals.last().unwrap(),
        ledger_max: max,
        target_reached: max >= target,
        accounts: report.accounts,
    }
}

pub fn run(args: &ForceArgs) -> anyhow::Result<()> {
    let file = load_file(&args.config)?;
    let path = read_path(&args.path)?;
    let resolved = ResolvedForce {
        a1: args.a1.or(file.a1).unwrap_or(2.0),
        a2: args.a2.or(file.a2).unwrap_or(2.0),
        k_min: args.kmin.or(file.k_min).unwrap_or(2),
        k_max: args.kmax.or(file.k_max).unwrap_or(6),
        range_threshold: args.range.or(file.range_threshold).unwrap_or(0.5),
        target_capital: args.target.or(file.target_capital).unwrap_or(2.0),
        accounts: args.accounts.or(file.accounts).unwrap_or(DEFAULT_ACCOUNTS),
        alpha: args.alpha.or(file.alpha).unwrap_or(1.0),
        beta: args.beta.or(file.beta).unwrap_or(1.0),
        window: (
            args.from.or(file.from).unwrap_or(0.0),
            args.to.or(file.to).unwrap_or_else(|| path.horizon()),
        ),
        round_budget: args.budget.or(file.round_budget).unwrap_or(DEFAULT_ROUND_BUDGET),
    };
    let cfg = MultiScaleConfig {
        a1: resolved.a1,
        a2: resolved.a2,
        k_min: resolved.k_min,
        k_max: resolved.k_max,
        prior: BetaBinomialParams::new(resolved.alpha, resolved.beta)?,
        range_threshold: resolved.range_threshold,
        target_capital: resolved.target_capital,
        window: resolved.window,
        round_budget: resolved.round_budget,
    };
    cfg.validate()?;

    let scales = run_multiscale(&path, &cfg)?;
    let two = two_account(&path, &cfg)?;
    let ladder = dyadic_ladder(&path, &cfg, resolved.accounts)?;
    let target = resolved.target_capital;

    let report = ForceReport {
        provenance: provenance(&resolved, vec![])?,
        config: resolved,
        scales,
        two_account: two,
        ladder: summarize_ladder(ladder, target),
    };
    write_json(&args.out, &report)
}
