use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::heatmap::render_heatmap;
use super::pipeline::{Outcome, Report, VariancePath};
use super::render::render_tables;
use crate::dcc::{simulate_dcc, CorrelationPath, DccParams, Sym2};
use crate::error::{Error, Result};
use crate::garch::{simulate_garch11, GarchParams};

const MARKER_KEY: &str = "# announcement_date=";

fn file_stem(parts: &[&str]) -> String {
    parts
        .iter()
        .map(|p| {
            p.chars()
                .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
                .collect::<String>()
        })
        .collect::<Vec<_>>()
        .join("_")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Write one `date,rho` CSV per path, preceded by an announcement marker line.
pub fn export_correlation_paths(
    paths: &[CorrelationPath],
    announcement: NaiveDate,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    ensure_dir(out_dir)?;
    let mut written = Vec::with_capacity(paths.len());
    for p in paths {
        let file = out_dir.join(format!("{}.csv", file_stem(&["rho", &p.asset_id, &p.index_id])));
        let mut out = create(&file)?;
        writeln!(out, "{MARKER_KEY}{announcement}").map_err(|e| Error::io(&file, e))?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["date", "rho"])?;
        for (d, r) in p.dates.iter().zip(&p.rho) {
            w.write_record([d.to_string(), r.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(&file, e))?;
        written.push(file);
    }
    Ok(written)
}

/// A correlation path read back from [`export_correlation_paths`] output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportedPath {
    pub announcement_date: Option<NaiveDate>,
    pub dates: Vec<NaiveDate>,
    pub rho: Vec<f64>,
}

pub fn read_correlation_path(path: &Path) -> Result<ExportedPath> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut first = String::new();
    reader.read_line(&mut first).map_err(|e| Error::io(path, e))?;
    let announcement_date = match first.trim().strip_prefix(MARKER_KEY) {
        Some(d) => Some(
            NaiveDate::parse_from_str(d, "%Y-%m-%d").map_err(|e| Error::MalformedRow {
                line: 1,
                reason: e.to_string(),
            })?,
        ),
        None => {
            return Err(Error::MalformedRow {
                line: 1,
                reason: "missing announcement marker".into(),
            })
        }
    };
    let mut rows = csv::Reader::from_reader(reader);
    let (mut dates, mut rho) = (Vec::new(), Vec::new());
    for (k, rec) in rows.records().enumerate() {
        let rec = rec?;
        let line = k + 3;
        let bad = |reason: String| Error::MalformedRow { line, reason };
        let d = rec.get(0).ok_or_else(|| bad("missing date".into()))?;
        let r = rec.get(1).ok_or_else(|| bad("missing rho".into()))?;
        dates.push(NaiveDate::parse_from_str(d, "%Y-%m-%d").map_err(|e| bad(e.to_string()))?);
        rho.push(r.parse::<f64>().map_err(|e| bad(e.to_string()))?);
    }
    Ok(ExportedPath {
        announcement_date,
        dates,
        rho,
    })
}

/// One `date,h` CSV per (pair, series).
pub fn export_variance_paths(paths: &[VariancePath], out_dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(out_dir)?;
    let mut written = Vec::with_capacity(paths.len());
    for p in paths {
        let file = out_dir.join(format!(
            "{}.csv",
            file_stem(&["h", &p.asset_id, &p.index_id, &p.series_id])
        ));
        let mut w = csv::Writer::from_writer(create(&file)?);
        w.write_record(["date", "h"])?;
        for (d, h) in p.dates.iter().zip(&p.h) {
            w.write_record([d.to_string(), h.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(&file, e))?;
        written.push(file);
    }
    Ok(written)
}

/// Write the JSON report, tables, heatmap and path CSVs into `out_dir`.
pub fn write_outputs(report: &Report, out_dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(out_dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, content: &str| -> Result<()> {
        let file = out_dir.join(name);
        std::fs::write(&file, content).map_err(|e| Error::io(&file, e))?;
        written.push(file);
        Ok(())
    };
    put("report.json", &report.to_json()?)?;
    for doc in render_tables(report) {
        put(&doc.file_name, &doc.content)?;
    }
    if let Outcome::Ok(m) = &report.correlation_matrix {
        put("heatmap.svg", &render_heatmap(&m.values, &m.labels)?)?;
    }
    let announcement = report.metadata.config.crisis.announcement;
    written.extend(export_correlation_paths(
        &report.correlation_paths,
        announcement,
        &out_dir.join("correlation_paths"),
    )?);
    if !report.variance_paths.is_empty() {
        written.extend(export_variance_paths(
            &report.variance_paths,
            &out_dir.join("variance_paths"),
        )?);
    }
    Ok(written)
}

/// Built-in simulation setups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// GARCH(1,1), omega 0.1, alpha 0.1, beta 0.85.
    Garch,
    /// Two such GARCH series joined by DCC(1,1), a 0.05, b 0.90, Qbar_12 0.5.
    Dcc,
}

pub const PRESET_LENGTH: usize = 2000;

pub fn preset_garch_params() -> GarchParams {
    GarchParams::new(0.0, 0.1, 0.1, 0.85).expect("valid preset")
}

/// Simulate a preset and write it as CSV: `date,return` or `date,asset,index`.
pub fn write_simulation(preset: Preset, seed: u64, t: usize, out: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(out)?);
    match preset {
        Preset::Garch => {
            let r = simulate_garch11(&preset_garch_params(), t, seed)?;
            w.write_record(["date", "return"])?;
            for (d, v) in r.dates().iter().zip(r.values()) {
                w.write_record([d.to_string(), v.to_string()])?;
            }
        }
        Preset::Dcc => {
            let g = preset_garch_params();
            let (a, b) = simulate_dcc(&g, &g, DccParams::new(0.05, 0.90)?, Sym2::correlation(0.5), t, seed)?;
            w.write_record(["date", "asset", "index"])?;
            for ((d, x), y) in a.dates().iter().zip(a.values()).zip(b.values()) {
                w.write_record([d.to_string(), x.to_string(), y.to_string()])?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(out, e))
}
