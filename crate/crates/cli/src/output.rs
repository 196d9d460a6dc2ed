//! CSV and JSON files written by the commands.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use collusion::{PeriodRecord, ProbeRow, Trace};
use serde::Serialize;

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "COLLUSION_OUT";

/// Root used when neither `--out` nor the environment variable is given.
pub fn output_root() -> PathBuf {
    std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("output"), PathBuf::from)
}

/// `value` with 17 significant digits, enough to read back the identical `f64`.
pub fn num(value: f64) -> String {
    if value == 0.0 || !value.is_finite() {
        return if value == 0.0 { "0".into() } else { value.to_string() };
    }
    let exponent = value.abs().log10().floor() as i32;
    if (-5..15).contains(&exponent) {
        format!("{:.*}", (16 - exponent) as usize, value)
    } else {
        format!("{value:.16e}")
    }
}

/// Fixed four-decimal rendering used in console tables.
pub fn display(value: f64) -> String {
    format!("{value:.4}")
}

pub fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Header names of the exposure columns: `exposure_j`, or `exposure_T_j` with several segments.
pub fn exposure_columns(bundles: usize, segments: usize) -> Vec<String> {
    (0..segments)
        .flat_map(|s| {
            (1..=bundles).map(move |j| {
                if segments == 1 {
                    format!("exposure_{j}")
                } else {
                    format!("exposure_{}_{j}", s + 1)
                }
            })
        })
        .collect()
}

fn numbered(prefix: &str, count: usize) -> impl Iterator<Item = String> + '_ {
    (1..=count).map(move |i| format!("{prefix}_{i}"))
}

/// Period records as `t, price_*, exposure_*, profit_*, epsilon`.
pub fn write_records(path: &Path, trace: &Trace, records: &[PeriodRecord<f64>]) -> anyhow::Result<()> {
    let mut out = create(path)?;
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain(numbered("price", trace.n_products))
        .chain(exposure_columns(trace.n_bundles, trace.n_segments))
        .chain(numbered("profit", trace.n_products))
        .chain(std::iter::once("epsilon".to_string()))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for rec in records {
        let mut line = rec.t.to_string();
        for &v in rec.prices.iter().chain(&rec.exposure).chain(&rec.profits) {
            line.push(',');
            line.push_str(&num(v));
        }
        line.push(',');
        line.push_str(&num(rec.epsilon));
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

/// Probe trajectory as `time, price_*, exposure_*, profit_*`.
pub fn write_probe(path: &Path, rows: &[ProbeRow<f64>], bundles: usize, segments: usize) -> anyhow::Result<()> {
    let mut out = create(path)?;
    let n = rows.first().map_or(0, |r| r.prices.len());
    let header: Vec<String> = std::iter::once("time".to_string())
        .chain(numbered("price", n))
        .chain(exposure_columns(bundles, segments))
        .chain(numbered("profit", n))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let mut line = row.time.to_string();
        for &v in row.prices.iter().chain(&row.exposure).chain(&row.profits) {
            line.push(',');
            line.push_str(&num(v));
        }
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}
