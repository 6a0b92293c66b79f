//! `paths gen`: sample-path generation to `time,price` files.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde::Serialize;
use vexforce_core::path::{generate, write_path_to, PathKind, PathSpec};

use crate::invalid;
use crate::out::write_atomic;

#[derive(Subcommand)]
pub enum PathsCmd {
    /// Generate one path file per seed
    Gen(GenArgs),
}

#[derive(Args, Serialize)]
pub struct GenArgs {
    /// Path model: constant | log-linear | sinusoid | weierstrass | fbm
    #[arg(long)]
    pub kind: String,
    /// Hurst index (fbm roughness; weierstrass target exponent)
    #[arg(long, default_value_t = 0.5)]
    pub hurst: f64,
    /// Volatility scale of fbm
    #[arg(long, default_value_t = 1.0)]
    pub vol: f64,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    /// Number of grid points (including both endpoints)
    #[arg(long, default_value_t = 4097)]
    pub points: usize,
    /// Initial price S(0)
    #[arg(long, default_value_t = 1.0)]
    pub s0: f64,
    /// Log-price slope (log-linear model)
    #[arg(long)]
    pub slope: Option<f64>,
    /// Log-price amplitude (sinusoid model)
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Full cycles over the horizon (sinusoid model)
    #[arg(long)]
    pub frequency: Option<f64>,
    /// Frequency base b > 1 (weierstrass model)
    #[arg(long)]
    pub base: Option<f64>,
    /// Seed(s); pass several to emit several files
    #[arg(long, required = true, num_args = 1..)]
    pub seed: Vec<u64>,
    /// Output file; must contain `{seed}` when more than one seed is given
    #[arg(long)]
    pub out: PathBuf,
}

fn kind_of(args: &GenArgs) -> anyhow::Result<PathKind> {
    let need = |opt: Option<f64>, name: &str| {
        opt.ok_or_else(|| invalid(format!("--{name} is required for --kind {}", args.kind)))
    };
    Ok(match args.kind.as_str() {
        "constant" => PathKind::Constant,
        "log-linear" => PathKind::LogLinear { slope: need(args.slope, "slope")? },
        "sinusoid" => PathKind::Sinusoid {
            amplitude: need(args.amplitude, "amplitude")?,
            frequency: need(args.frequency, "frequency")?,
        },
        "weierstrass" => PathKind::Weierstrass {
            base: need(args.base, "base")?,
            holder: args.hurst,
        },
        "fbm" => PathKind::Fbm,
        other => {
            return Err(invalid(format!(
                "unknown path kind {other:?}; expected constant | log-linear | sinusoid | weierstrass | fbm"
            )))
        }
    })
}

pub fn run(args: &GenArgs) -> anyhow::Result<()> {
    let kind = kind_of(args)?;
    let out_template = args.out.to_str().ok_or_else(|| invalid("--out must be valid UTF-8"))?;
    if args.seed.len() > 1 && !out_template.contains("{seed}") {
        return Err(invalid("multiple seeds need an --out containing `{seed}`"));
    }
    for &seed in &args.seed {
        let spec = PathSpec {
            kind: kind.clone(),
            hurst: args.hurst,
            volatility: args.vol,
            horizon: args.horizon,
            n_points: args.points,
            initial_price: args.s0,
            seed,
        };
        let path = generate(&spec)?;
        let mut buf = Vec::new();
        write_path_to(&path, &mut buf)?;
        let dest = PathBuf::from(out_template.replace("{seed}", &seed.to_string()));
        write_atomic(&dest, &buf)?;
    }
    Ok(())
}
