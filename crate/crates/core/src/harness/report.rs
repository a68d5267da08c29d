//! CSV rows plus a JSON manifest.

use crate::ensembles::ClassKind;
use crate::error::{Error, Result};
use crate::harness::{RateFit, SweepConfig, SweepRow};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

pub const CSV_HEADER: [&str; 9] = [
    "class",
    "d",
    "T",
    "k",
    "seed_count",
    "mean_gap",
    "std_gap",
    "theorem_rate",
    "active_term",
];

/// 17 significant digits, enough to round-trip an `f64`.
fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "NaN".into()
    }
}

/// Writes rows to `writer` in the documented schema.
pub fn write_rows<W: std::io::Write>(rows: &[SweepRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.class.short_name().to_string(),
            r.dim.to_string(),
            r.horizon.to_string(),
            r.sparsity.map(|k| k.to_string()).unwrap_or_default(),
            r.seed_count.to_string(),
            fmt_f64(r.mean_gap),
            fmt_f64(r.std_gap),
            fmt_f64(r.theorem_rate),
            r.active_term.clone(),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    version: String,
    master_seed: u64,
    csv: String,
    csv_header: [&'static str; 9],
    row_count: usize,
    failed_cells: usize,
    fit_count: usize,
    fits: &'a [RateFit],
    config: &'a SweepConfig,
}

/// Path of the manifest written next to `csv_path`.
pub fn manifest_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("manifest.json")
}

/// Writes `path` (CSV) and its manifest. Output is byte-identical for equal inputs.
pub fn emit_report(rows: &[SweepRow], fits: &[RateFit], config: &SweepConfig, path: &Path) -> Result<PathBuf> {
    let mut buf = Vec::new();
    write_rows(rows, &mut buf)?;
    fs::write(path, &buf).map_err(|e| Error::io(path, e))?;
    let manifest = Manifest {
        version: format!("scolb {}", env!("CARGO_PKG_VERSION")),
        master_seed: config.master_seed,
        csv: path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
        csv_header: CSV_HEADER,
        row_count: rows.len(),
        failed_cells: rows.iter().filter(|r| r.failed()).count(),
        fit_count: fits.len(),
        fits,
        config,
    };
    let mpath = manifest_path(path);
    let text = serde_json::to_string_pretty(&manifest)?;
    fs::write(&mpath, text + "\n").map_err(|e| Error::io(&mpath, e))?;
    Ok(mpath)
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad number '{s}' in results CSV")))
}

/// Reads rows written by [`emit_report`].
pub fn read_rows(path: &Path) -> Result<Vec<SweepRow>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::InvalidConfig(format!(
            "unexpected header in {}: {:?}",
            path.display(),
            header
        )));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<usize> {
            rec[i]
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad integer '{}' in results CSV", &rec[i])))
        };
        rows.push(SweepRow {
            class: rec[0].parse::<ClassKind>().map_err(Error::InvalidConfig)?,
            dim: num(1)?,
            horizon: num(2)?,
            sparsity: if rec[3].is_empty() { None } else { Some(num(3)?) },
            seed_count: num(4)?,
            mean_gap: parse_f64(&rec[5])?,
            std_gap: parse_f64(&rec[6])?,
            theorem_rate: parse_f64(&rec[7])?,
            active_term: rec[8].to_string(),
        });
    }
    Ok(rows)
}
