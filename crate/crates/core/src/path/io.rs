//! Plain-text path serialization.
//!
//! Format: one header line `time,price`, then one `time,price` record per
//! grid point, decimals carrying 17+ significant digits so the written
//! doubles parse back exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::path::PricePath;

pub const PATH_FILE_HEADER: &str = "time,price";

/// Pick a price double whose natural log reproduces `log_price` bit-exactly.
///
/// `ln(exp(x))` can land one ulp off; since ln is monotone, scanning the
/// immediate float neighbors of `exp(x)` finds the exact preimage whenever
/// one exists.
pub(super) fn price_for_log(log_price: f64) -> f64 {
    let p = log_price.exp();
    if p.ln() == log_price {
        return p;
    }
    let mut up = p;
    let mut down = p;
    for _ in 0..4 {
        up = next_after(up, f64::INFINITY);
        if up.ln() == log_price {
            return up;
        }
        down = next_after(down, 0.0);
        if down.ln() == log_price {
            return down;
        }
    }
    p
}

fn next_after(x: f64, toward: f64) -> f64 {
    if x == toward || x.is_nan() {
        return x;
    }
    let bits = x.to_bits();
    let next = if (x < toward) == (x > 0.0) || x == 0.0 && toward > 0.0 {
        bits + 1
    } else {
        bits - 1
    };
    f64::from_bits(next)
}

/// Serialize a path to `destination` in the two-column text format.
pub fn write_path(path: &PricePath, destination: &Path) -> Result<()> {
    let file = File::create(destination)?;
    let mut w = BufWriter::new(file);
    write_path_to(path, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_path_to(path: &PricePath, w: &mut impl Write) -> Result<()> {
    writeln!(w, "{PATH_FILE_HEADER}")?;
    for (t, lp) in path.times().iter().zip(path.log_prices()) {
        writeln!(w, "{:.17e},{:.17e}", t, price_for_log(*lp))?;
    }
    Ok(())
}

/// Parse a path file. Validation failures report the 1-based line number.
pub fn read_path(source: &Path) -> Result<PricePath> {
    let file = File::open(source)?;
    read_path_from(BufReader::new(file))
}

pub fn read_path_from(r: impl Read) -> Result<PricePath> {
    let reader = BufReader::new(r);
    let mut times = Vec::new();
    let mut log_prices = Vec::new();
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, message: "empty file".into() })??;
    if header.trim() != PATH_FILE_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header '{PATH_FILE_HEADER}', got '{}'", header.trim()),
        });
    }
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut cols = trimmed.split(',');
        let (t_str, p_str) = match (cols.next(), cols.next(), cols.next()) {
            (Some(t), Some(p), None) => (t, p),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: "expected exactly two comma-separated columns".into(),
                })
            }
        };
        let t: f64 = t_str.trim().parse().map_err(|e| Error::Parse {
            line: line_no,
            message: format!("bad time '{}': {e}", t_str.trim()),
        })?;
        let p: f64 = p_str.trim().parse().map_err(|e| Error::Parse {
            line: line_no,
            message: format!("bad price '{}': {e}", p_str.trim()),
        })?;
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("price must be strictly positive and finite, got {p}"),
            });
        }
        if let Some(&prev) = times.last() {
            if !(t > prev) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("time column must be strictly increasing ({t} after {prev})"),
                });
            }
        }
        times.push(t);
        log_prices.push(p.ln());
    }
    PricePath::new(times, log_prices)
}
