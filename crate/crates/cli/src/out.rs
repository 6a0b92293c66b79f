//! Report plumbing: provenance headers, atomic file writes, and the fixed
//! float formatting that keeps delimited outputs byte-reproducible.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Header carried by every structured report so a run can be reproduced
/// from the report alone.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub artifact_version: String,
    /// SHA-256 of the resolved configuration, canonically serialized.
    pub config_hash: String,
    pub seeds: Vec<u64>,
}

pub fn provenance<C: Serialize>(config: &C, seeds: Vec<u64>) -> anyhow::Result<Provenance> {
    let canonical = serde_json::to_string(config).context("serializing config for hashing")?;
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    Ok(Provenance {
        artifact_version: VERSION.to_string(),
        config_hash: format!("{:x}", hasher.finalize()),
        seeds,
    })
}

/// Write through a temp file in the destination directory so a failure never
/// leaves a partial output behind.
pub fn write_atomic(dest: &Path, contents: &[u8]) -> anyhow::Result<()> {
    let dir = dest
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(contents)?;
    tmp.persist(dest)
        .with_context(|| format!("writing {}", dest.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(dest: &Path, report: &T) -> anyhow::Result<()> {
    let mut body = serde_json::to_string_pretty(report).context("serializing report")?;
    body.push('\n');
    write_atomic(dest, body.as_bytes())
}

/// 17 significant digits: enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.17e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}
