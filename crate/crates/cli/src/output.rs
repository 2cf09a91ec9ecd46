//! Result files. Every file is written to a temporary sibling and renamed
//! into place.

use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::error::{CliError, Result};
use crate::experiment::{RunOutput, SweepOutput, TraceRow};

/// Shortest text that parses back to the same `f64`; scientific notation
/// only for very small or very large magnitudes.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let err = |e: std::io::Error| CliError::Output(format!("{}: {e}", path.display()));
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(err)?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let mut f = std::fs::File::create(&tmp).map_err(err)?;
    f.write_all(bytes).and_then(|_| f.sync_all()).map_err(err)?;
    std::fs::rename(&tmp, path).map_err(err)
}

fn csv_bytes(header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let out = |e: csv::Error| CliError::Output(e.to_string());
    w.write_record(header).map_err(out)?;
    for r in rows {
        w.write_record(&r).map_err(out)?;
    }
    w.into_inner().map_err(|e| CliError::Output(e.to_string()))
}

pub fn trace_csv(trace: &[TraceRow]) -> Result<Vec<u8>> {
    let header = ["t", "cluster", "k", "p", "rho_a", "v", "icvi_value"].map(String::from);
    csv_bytes(
        &header,
        trace.iter().map(|r| {
            vec![
                r.t.to_string(),
                r.cluster.to_string(),
                r.k.to_string(),
                r.p.to_string(),
                opt_f64(r.rho_a),
                opt(r.v),
                opt_f64(r.icvi_value),
            ]
        }),
    )
}

fn cell(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => fmt_f64(n.as_f64().unwrap_or(f64::NAN)),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn sweep_csv(s: &SweepOutput) -> Result<Vec<u8>> {
    let keys: Vec<String> = s.config.sweep.keys().cloned().collect();
    let mut header = keys.clone();
    header.extend(["ari", "acc", "n_mis", "k_hat", "p", "runtime_s"].map(String::from));
    csv_bytes(
        &header,
        s.rows.iter().map(|r| {
            let mut row: Vec<String> = keys
                .iter()
                .map(|k| r.params.get(k).map(cell).unwrap_or_default())
                .collect();
            let m = &r.metrics;
            row.extend([
                opt_f64(m.ari),
                opt_f64(m.acc),
                opt(m.n_mis),
                m.k_hat.to_string(),
                m.p.to_string(),
                fmt_f64(r.runtime_s),
            ]);
            row
        }),
    )
}

fn json<T: serde::Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(v).map_err(|e| CliError::Output(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// `results.json` and `trace.csv`.
pub fn write_run(dir: &Path, out: &RunOutput) -> Result<()> {
    write_atomic(&dir.join("results.json"), &json(&out.results)?)?;
    write_atomic(&dir.join("trace.csv"), &trace_csv(&out.trace)?)
}

/// `sweep.csv` with one row per grid point and `sweep.json` with the best
/// point and the full table.
pub fn write_sweep(dir: &Path, out: &SweepOutput) -> Result<()> {
    write_atomic(&dir.join("sweep.csv"), &sweep_csv(out)?)?;
    let summary = serde_json::json!({
        "best": out.best_row(),
        "rows": out.rows,
        "config": out.config,
    });
    write_atomic(&dir.join("sweep.json"), &json(&summary)?)
}
