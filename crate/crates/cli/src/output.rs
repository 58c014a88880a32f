//! CSV tables plus a JSON manifest per run.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

pub fn to_csv<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a, S: Serialize> {
    pub experiment: &'a str,
    pub version: &'a str,
    pub spec: &'a S,
    pub tables: Vec<&'a str>,
    pub wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<serde_json::Value>,
}

/// Writes each (file name, CSV) table and `manifest.json` into `dir`.
pub fn write_run<S: Serialize>(
    dir: &Path,
    experiment: &str,
    spec: &S,
    tables: &[(&str, String)],
    wall_time_s: f64,
    summary: Option<serde_json::Value>,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (name, body) in tables {
        fs::write(dir.join(name), body)?;
    }
    let manifest = Manifest {
        experiment,
        version: env!("CARGO_PKG_VERSION"),
        spec,
        tables: tables.iter().map(|(n, _)| *n).collect(),
        wall_time_s,
        summary,
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}
