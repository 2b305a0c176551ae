//! JSON `{meta, rows}` documents and their CSV form.
//!
//! JSON keys are emitted sorted, so re-reading and re-emitting a file is
//! byte-identical. CSV files start with one `# meta <json>` line.

use std::fs;
use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

pub fn pair(re: f64, im: f64) -> [f64; 2] {
    [re, im]
}

/// Provenance shared by every output file.
pub fn provenance(cfg: &RunConfig, command: &str, extra: Value) -> Value {
    let mut meta = json!({
        "tool": "ellface",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "family": cfg.family.letter().to_string(),
        "rank": cfg.rank,
        "q": cfg.q,
        "r": cfg.r,
        "weights": cfg.s,
        "heights": cfg.weight.eps_coords(&cfg.spec),
        "eta": cfg.spec.eta,
        "u": cfg.u,
        "z": cfg.z_grid(),
        "trunc_K": cfg.trunc_k,
        "series_cutoff": cfg.series_cutoff,
        "product_cutoff": cfg.product_cutoff,
        "tol": cfg.tol,
        "suite": cfg.suite,
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut meta, extra) {
        m.extend(e);
    }
    meta
}

/// Renders a document. `csv_rows` must hold the rows in the same order as `rows`.
pub fn render<R: Serialize, C: Serialize>(cfg: &RunConfig, meta: Value, rows: &[R], csv_rows: &[C]) -> Result<String, CliError> {
    match cfg.format {
        Format::Json => {
            let doc = json!({ "meta": meta, "rows": serde_json::to_value(rows)? });
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
            for r in csv_rows {
                w.serialize(r)?;
            }
            let body = String::from_utf8(w.into_inner().map_err(|e| CliError::Serialize(e.to_string()))?)
                .map_err(|e| CliError::Serialize(e.to_string()))?;
            Ok(format!("# meta {}\n{body}", serde_json::to_string(&meta)?))
        }
    }
}

pub fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}
