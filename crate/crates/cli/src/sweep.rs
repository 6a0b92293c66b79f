//! `sweep`: seeded Monte Carlo multi-scale runs with per-(H, k) aggregates.

use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use vexforce_core::forcing::{run_multiscale, MultiScaleConfig, ScaleRecord, DEFAULT_ROUND_BUDGET};
use vexforce_core::path::{gen_fbm, PathKind, PathSpec};
use vexforce_core::strategy::BetaBinomialParams;

use crate::invalid;
use crate::out::{fmt_opt, provenance, write_atomic, write_json, Provenance};

pub const RECORD_HEADER: &str = "k,n_star,h,t,TV,L,sigma,p,logK_exact,logK_eq12,logK_regime";

#[derive(Args)]
pub struct SweepArgs {
    /// TOML config file; command-line flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Hurst indices to sweep
    #[arg(long, num_args = 1..)]
    pub hurst: Option<Vec<f64>>,
    #[arg(long)]
    pub vol: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub s0: Option<f64>,
    #[arg(long)]
    pub a1: Option<f64>,
    #[arg(long)]
    pub a2: Option<f64>,
    #[arg(long)]
    pub kmin: Option<u32>,
    #[arg(long)]
    pub kmax: Option<u32>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub budget: Option<usize>,
    /// Number of seeds (base-seed, base-seed+1, ...)
    #[arg(long)]
    pub seeds: Option<usize>,
    #[arg(long)]
    pub base_seed: Option<u64>,
    /// Explicit seed list, comma separated; wins over --seeds
    #[arg(long, value_delimiter = ',')]
    pub seed_list: Option<Vec<u64>>,
    /// Per-seed record table (one CSV per Hurst value)
    #[arg(long)]
    pub records_out: Option<PathBuf>,
    /// Aggregate report
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// File-level mirror of the flags; every field optional so flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    #[serde(default)]
    pub path: PathSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub prior: PriorSection,
    #[serde(default)]
    pub seeds: SeedSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub game: GameSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSection {
    pub hurst: Option<Vec<f64>>,
    pub volatility: Option<f64>,
    pub horizon: Option<f64>,
    pub points: Option<usize>,
    pub initial_price: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    pub k_min: Option<u32>,
    pub k_max: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorSection {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSection {
    pub base: Option<u64>,
    pub count: Option<usize>,
    pub list: Option<Vec<u64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub records: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSection {
    pub round_budget: Option<usize>,
}

/// Fully resolved sweep configuration; serialized for the provenance hash.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedSweep {
    pub hurst: Vec<f64>,
    pub volatility: f64,
    pub horizon: f64,
    pub points: usize,
    pub initial_price: f64,
    pub a1: f64,
    pub a2: f64,
    pub k_min: u32,
    pub k_max: u32,
    pub alpha: f64,
    pub beta: f64,
    pub round_budget: usize,
}

pub fn load_file(path: &Option<PathBuf>) -> anyhow::Result<SweepFile> {
    match path {
        None => Ok(SweepFile::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| invalid(format!("reading config {}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| invalid(format!("parsing {}: {e}", p.display())))
        }
    }
}

pub fn resolve_seeds(
    list: Option<Vec<u64>>,
    count: Option<usize>,
    base: Option<u64>,
    default_count: usize,
) -> Vec<u64> {
    let mut seeds = match list {
        Some(list) => list,
        None => {
            let base = base.unwrap_or(0);
            (0..count.unwrap_or(default_count) as u64).map(|i| base + i).collect()
        }
    };
    // Canonical order: the aggregate must not depend on how seeds were listed.
    seeds.sort_unstable();
    seeds.dedup();
    seeds
}

fn resolve(args: &SweepArgs, file: &SweepFile) -> ResolvedSweep {
    ResolvedSweep {
        hurst: args
            .hurst
            .clone()
            .or_else(|| file.path.hurst.clone())
            .unwrap_or_else(|| vec![0.5]),
        volatility: args.vol.or(file.path.volatility).unwrap_or(1.0),
        horizon: args.horizon.or(file.path.horizon).unwrap_or(1.0),
        points: args.points.or(file.path.points).unwrap_or((1 << 18) + 1),
        initial_price: args.s0.or(file.path.initial_price).unwrap_or(1.0),
        a1: args.a1.or(file.grid.a1).unwrap_or(2.0),
        a2: args.a2.or(file.grid.a2).unwrap_or(2.0),
        k_min: args.kmin.or(file.grid.k_min).unwrap_or(3),
        k_max: args.kmax.or(file.grid.k_max).unwrap_or(5),
        alpha: args.alpha.or(file.prior.alpha).unwrap_or(1.0),
        beta: args.beta.or(file.prior.beta).unwrap_or(1.0),
        round_budget: args.budget.or(file.game.round_budget).unwrap_or(DEFAULT_ROUND_BUDGET),
    }
}

fn multiscale_config(r: &ResolvedSweep) -> anyhow::Result<MultiScaleConfig> {
    Ok(MultiScaleConfig {
        a1: r.a1,
        a2: r.a2,
        k_min: r.k_min,
        k_max: r.k_max,
        prior: BetaBinomialParams::new(r.alpha, r.beta)?,
        // The band parameters are not exercised by the sweep.
        range_threshold: 1.0,
        target_capital: 2.0,
        window: (0.0, r.horizon),
        round_budget: r.round_budget,
    })
}

pub fn record_row(rec: &ScaleRecord) -> String {
    let (n_star, h, t, tv, l, sigma, p) = match rec.summary {
        Some(s) => (s.n_star, s.heads, s.tails, Some(s.tv), Some(s.l), s.sigma, s.p),
        None => (0, 0, 0, None, None, None, None),
    };
    let eq12 = rec.prediction.map(|pr| pr.exact);
    let regime = rec.prediction.map(|pr| pr.approx);
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        rec.k,
        n_star,
        h,
        t,
        fmt_opt(tv),
        fmt_opt(l),
        fmt_opt(sigma),
        fmt_opt(p),
        fmt_opt(rec.log_capital),
        fmt_opt(eq12),
        fmt_opt(regime),
    )
}

#[derive(Serialize)]
struct Quantiles {
    n: usize,
    q25: f64,
    median: f64,
    q75: f64,
}

fn quantiles(values: &mut Vec<f64>) -> Option<Quantiles> {
    values.retain(|v| v.is_finite());
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let at = |q: f64| values[((values.len() - 1) as f64 * q).round() as usize];
    Some(Quantiles { n: values.len(), q25: at(0.25), median: at(0.5), q75: at(0.75) })
}

#[derive(Serialize)]
struct CellAggregate {
    hurst: f64,
    k: u32,
    seeds: usize,
    skipped: usize,
    log_capital: Option<Quantiles>,
    tv: Option<Quantiles>,
    n_star: Option<Quantiles>,
}

#[derive(Serialize)]
struct SweepReport {
    provenance: Provenance,
    config: ResolvedSweep,
    cells: Vec<CellAggregate>,
}

pub fn run(args: &SweepArgs) -> anyhow::Result<()> {
    let file = load_file(&args.config)?;
    let resolved = resolve(args, &file);
    let seeds = resolve_seeds(
        args.seed_list.clone().or_else(|| file.seeds.list.clone()),
        args.seeds.or(file.seeds.count),
        args.base_seed.or(file.seeds.base),
        20,
    );
    if seeds.is_empty() {
        return Err(invalid("sweep needs at least one seed"));
    }
    let out = args
        .out
        .clone()
        .or_else(|| file.output.report.clone())
        .ok_or_else(|| invalid("sweep needs an --out report path"))?;
    let records_out = args.records_out.clone().or_else(|| file.output.records.clone());
    if resolved.hurst.len() > 1 {
        if let Some(r) = &records_out {
            let s = r.to_str().ok_or_else(|| invalid("records path must be valid UTF-8"))?;
            if !s.contains("{hurst}") {
                return Err(invalid("multiple Hurst values need a records path containing `{hurst}`"));
            }
        }
    }
    let cfg = multiscale_config(&resolved)?;
    cfg.validate()?;

    let mut cells = Vec::new();
    for &hurst in &resolved.hurst {
        // Seeds run in parallel; collect() preserves seed order, so the
        // output is deterministic regardless of scheduling.
        let per_seed: Vec<Vec<ScaleRecord>> = seeds
            .par_iter()
            .map(|&seed| {
                let spec = PathSpec {
                    kind: PathKind::Fbm,
                    hurst,
                    volatility: resolved.volatility,
                    horizon: resolved.horizon,
                    n_points: resolved.points,
                    initial_price: resolved.initial_price,
                    seed,
                };
                let path = gen_fbm(&spec)?;
                run_multiscale(&path, &cfg)
            })
            .collect::<Result<_, _>>()?;

        if let Some(records_out) = &records_out {
            let mut body = String::from(RECORD_HEADER);
            body.push('\n');
            for records in &per_seed {
                for rec in records {
                    body.push_str(&record_row(rec));
                    body.push('\n');
                }
            }
            let dest = records_out
                .to_str()
                .ok_or_else(|| invalid("records path must be valid UTF-8"))?
                .replace("{hurst}", &format!("{hurst}"));
            write_atomic(std::path::Path::new(&dest), body.as_bytes())?;
        }

        for (ki, k) in (resolved.k_min..=resolved.k_max).enumerate() {
            let recs: Vec<&ScaleRecord> = per_seed.iter().map(|r| &r[ki]).collect();
            let skipped = recs.iter().filter(|r| r.skipped.is_some()).count();
            let mut log_k: Vec<f64> = recs.iter().filter_map(|r| r.log_capital).collect();
            let mut tv: Vec<f64> =
                recs.iter().filter_map(|r| r.summary.map(|s| s.tv)).collect();
            let mut n_star: Vec<f64> =
                recs.iter().filter_map(|r| r.summary.map(|s| s.n_star as f64)).collect();
            cells.push(CellAggregate {
                hurst,
                k,
                seeds: recs.len(),
                skipped,
                log_capital: quantiles(&mut log_k),
                tv: quantiles(&mut tv),
                n_star: quantiles(&mut n_star),
            });
        }
    }

    let report = SweepReport {
        provenance: provenance(&resolved, seeds.clone())?,
        config: resolved,
        cells,
    };
    write_json(&out, &report)?;
    Ok(())
}
