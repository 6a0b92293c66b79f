//! `analyze`: p-variation, variation-exponent estimation, and jaggedness
//! event checks on a path file.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use vexforce_core::analysis::{
    band_exit_time, default_epsilons, in_event_lower, in_event_range, in_event_upper, log_range,
    vex_estimate, VariationReport, DEFAULT_EVENT_ANCHORS,
};
use vexforce_core::path::read_path;

use crate::invalid;
use crate::out::{provenance, write_json, Provenance};

#[derive(Args, Serialize)]
pub struct AnalyzeArgs {
    /// Input path file (time,price)
    #[arg(long)]
    pub path: PathBuf,
    /// Window start
    #[arg(long, default_value_t = 0.0)]
    pub from: f64,
    /// Window end (default: path horizon)
    #[arg(long)]
    pub to: Option<f64>,
    /// p grid for the variation-exponent estimate (strictly increasing)
    #[arg(long, num_args = 2.., value_delimiter = ',',
          default_values_t = [1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 3.0, 3.5, 4.0])]
    pub p: Vec<f64>,
    /// Deepest dyadic refinement level
    #[arg(long, default_value_t = 14)]
    pub depth: u32,
    /// Hölder exponent of the event checks
    #[arg(long, default_value_t = 0.5)]
    pub exponent: f64,
    /// Hölder coefficient of the event checks
    #[arg(long, default_value_t = 1.0)]
    pub coeff: f64,
    /// Range-band width A; enables the bounded-range check
    #[arg(long)]
    pub range: Option<f64>,
    /// Structured report output
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct EventReport {
    upper: bool,
    lower: bool,
    range: Option<bool>,
    log_range: f64,
    band_exit_time: Option<f64>,
}

#[derive(Serialize)]
struct AnalyzeReport<'a> {
    provenance: Provenance,
    config: &'a AnalyzeArgs,
    window: (f64, f64),
    n_points: usize,
    variation: VariationReport,
    events: EventReport,
}

pub fn run(args: &AnalyzeArgs) -> anyhow::Result<()> {
    let path = read_path(&args.path)?;
    let t1 = args.from;
    let t2 = args.to.unwrap_or_else(|| path.horizon());
    if !(t1 < t2) {
        return Err(invalid("window must satisfy --from < --to"));
    }

    let variation = vex_estimate(&path, &args.p, args.depth, t1, t2)?;
    let epsilons = default_epsilons(t1, t2);
    let events = EventReport {
        upper: in_event_upper(&path, args.exponent, args.coeff, t1, t2),
        lower: in_event_lower(
            &path,
            args.exponent,
            args.coeff,
            t1,
            t2,
            &epsilons,
            DEFAULT_EVENT_ANCHORS,
        ),
        range: args.range.map(|a| in_event_range(&path, a, t1, t2)),
        log_range: log_range(&path, t1, t2),
        band_exit_time: args
            .range
            .and_then(|a| band_exit_time(&path, t1, t2, a / 2.0)),
    };

    let report = AnalyzeReport {
        provenance: provenance(args, vec![])?,
        config: args,
        window: (t1, t2),
        n_points: path.len(),
        variation,
        events,
    };
    write_json(&args.out, &report)
}
