//! Schema-versioned result and manifest documents, plus deterministic JSON
//! and CSV writers.
//!
//! Result files must be byte-identical across reruns with the same
//! `(config, seed)` under any thread budget, so every volatile field
//! (timestamp, wall clock) lives in the manifest and nowhere else. JSON is
//! serialized with stable struct-order keys and shortest-roundtrip floats.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// One named statistical check inside a report.
#[derive(Clone, Debug, Serialize)]
pub struct TestResult {
    pub name: String,
    pub statistic: f64,
    /// p-value when the check is a hypothesis test; None for direct bounds.
    pub p: Option<f64>,
    pub pass: bool,
}

impl TestResult {
    pub fn bound(name: impl Into<String>, statistic: f64, pass: bool) -> Self {
        TestResult { name: name.into(), statistic, p: None, pass }
    }
}

/// Uniform experiment report: configuration echo, estimates, and checks.
#[derive(Clone, Debug, Serialize)]
pub struct Report<C: Serialize, E: Serialize> {
    pub schema_version: u32,
    pub experiment: String,
    pub config: C,
    pub estimates: E,
    pub tests: Vec<TestResult>,
    pub pass: bool,
}

impl<C: Serialize, E: Serialize> Report<C, E> {
    pub fn new(experiment: impl Into<String>, config: C, estimates: E, tests: Vec<TestResult>) -> Self {
        let pass = tests.iter().all(|t| t.pass);
        Report { schema_version: SCHEMA_VERSION, experiment: experiment.into(), config, estimates, tests, pass }
    }
}

/// Run manifest: the one file that carries volatile fields.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest<C: Serialize> {
    pub schema_version: u32,
    pub tool_version: &'static str,
    /// Full configuration echo with every defaulted field materialized.
    pub config: C,
    pub wall_clock_seconds: f64,
    pub timestamp_unix: u64,
}

impl<C: Serialize> Manifest<C> {
    pub fn new(config: C, wall_clock_seconds: f64) -> Self {
        let timestamp_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Manifest {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            config,
            wall_clock_seconds,
            timestamp_unix,
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut body = serde_json::to_string_pretty(value)?;
    body.push('\n');
    fs::write(path, body)?;
    Ok(())
}

/// CSV with a header row; cells are shortest-roundtrip formatted.
pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut out = fs::File::create(path)?;
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}
