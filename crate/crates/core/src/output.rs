//! CSV and summary files.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64` exactly, so identical runs give identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use crate::diagnostics::{DiagnosticsRecord, COLUMNS};
use crate::error::{Error, Result};
use crate::solver::RunResult;

/// Exact decimal form of `x`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Malformed(format!("{what}: `{s}` is not a number")))
}

pub fn write_diagnostics<W: Write>(out: W, records: &[DiagnosticsRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for rec in records {
        w.write_record(rec.values().iter().map(|&x| fmt_f64(x)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_diagnostics_file(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    write_diagnostics(std::fs::File::create(path)?, records)
}

/// Reads a diagnostics CSV; the header must match [`COLUMNS`] exactly, at
/// least one row must be present, and the file must end in a newline (the
/// writer always emits one, so a missing newline means truncation).
pub fn read_diagnostics<R: Read>(mut input: R) -> Result<Vec<DiagnosticsRecord>> {
    let mut text = Vec::new();
    input.read_to_end(&mut text)?;
    if !text.ends_with(b"\n") {
        return Err(Error::Malformed(
            "file is truncated (no final newline)".into(),
        ));
    }
    let mut r = csv::Reader::from_reader(text.as_slice());
    let header = r
        .headers()
        .map_err(|e| Error::Malformed(format!("header: {e}")))?
        .clone();
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(Error::Malformed(format!(
            "header is {:?}, expected {}",
            header.iter().collect::<Vec<_>>(),
            COLUMNS.join(",")
        )));
    }
    let mut records = Vec::new();
    for (i, row) in r.records().enumerate() {
        let row = row.map_err(|e| Error::Malformed(format!("row {}: {e}", i + 1)))?;
        let mut v = [0.0; 12];
        for (slot, (field, name)) in v.iter_mut().zip(row.iter().zip(COLUMNS)) {
            *slot = parse_f64(field, &format!("row {} column {name}", i + 1))?;
        }
        records.push(DiagnosticsRecord::from_values(v));
    }
    if records.is_empty() {
        return Err(Error::Malformed("no data rows".into()));
    }
    Ok(records)
}

pub fn read_diagnostics_file(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    read_diagnostics(std::fs::File::open(path)?)
}

/// `key = value` run summary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    entries: BTreeMap<String, String>,
}

impl Summary {
    pub fn from_run(run: &RunResult, p: f64) -> Self {
        let mut s = Self::default();
        let opt = |x: Option<f64>| x.map_or("none".to_string(), fmt_f64);
        s.insert("outcome", run.outcome.name());
        s.insert("outcome_time", opt(run.outcome.time()));
        s.insert("p", fmt_f64(p));
        s.insert("amplitude", fmt_f64(run.amplitude));
        s.insert("e0", fmt_f64(run.e0));
        s.insert("j0", fmt_f64(run.j0));
        s.insert("jp0", fmt_f64(run.jp0));
        s.insert("c", fmt_f64(run.c));
        s.insert("t_star", opt(run.t_star));
        s.insert(
            "blowup_time",
            opt(run
                .outcome
                .is_blowup()
                .then(|| run.outcome.time())
                .flatten()),
        );
        s.insert("admissible", run.admissible.to_string());
        if let Some(th) = &run.thresholds {
            s.insert("kappa_min", fmt_f64(th.kappa_min));
            s.insert("p_min", fmt_f64(th.p_min));
        }
        s.insert("steps", run.steps.to_string());
        s.insert("final_dt", fmt_f64(run.final_dt));
        s.insert("max_mass_drift", fmt_f64(run.max_mass_drift));
        s.insert("min_slack", fmt_f64(run.min_slack));
        s.insert(
            "max_concavity_violation",
            fmt_f64((-run.min_slack).max(0.0)),
        );
        s.insert("concavity_tolerance", fmt_f64(run.concavity_tolerance));
        s.insert("growth_exponent", opt(run.growth_exponent));
        s.insert(
            "identity_failures",
            run.identity_failures().len().to_string(),
        );
        s
    }

    pub fn insert(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Numeric value; `None` if absent or recorded as `none`.
    pub fn number(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None | Some("none") => Ok(None),
            Some(v) => parse_f64(v, key).map(Some),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Self::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Malformed(format!("summary line {}: expected `key = value`", no + 1))
            })?;
            s.insert(k.trim(), v.trim());
        }
        Ok(s)
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_string())?;
        Ok(())
    }
}

impl std::fmt::Display for Summary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut text = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(text, "{k} = {v}");
        }
        f.write_str(&text)
    }
}

pub const PHASE_COLUMNS: [&str; 8] = [
    "p",
    "amplitude",
    "E0",
    "outcome",
    "time",
    "cells",
    "dt",
    "error",
];

/// One row of a sweep's phase table. `time` is the blow-up time, or the
/// time reached otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRow {
    pub p: f64,
    /// Amplitude actually used (the factor times `A*`).
    pub amplitude: f64,
    pub e0: f64,
    pub outcome: String,
    pub time: f64,
    pub cells: usize,
    pub dt: f64,
    /// Set when the run could not be set up or failed.
    pub error: Option<String>,
}

pub fn write_phase_table<W: Write>(out: W, rows: &[PhaseRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PHASE_COLUMNS)?;
    for r in rows {
        w.write_record([
            fmt_f64(r.p),
            fmt_f64(r.amplitude),
            fmt_f64(r.e0),
            r.outcome.clone(),
            fmt_f64(r.time),
            r.cells.to_string(),
            fmt_f64(r.dt),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub const CERTIFICATE_COLUMNS: [&str; 8] = [
    "manifold",
    "n",
    "residual",
    "c",
    "tau1",
    "tau2",
    "kappa_min",
    "p_min",
];

/// Row of the `verify` certificate table.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateRow {
    pub manifold: String,
    pub n: usize,
    pub residual: f64,
    pub c: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub kappa_min: f64,
    pub p_min: f64,
}

pub fn write_certificate<W: Write>(out: W, rows: &[CertificateRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CERTIFICATE_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.manifold.clone(),
            r.n.to_string(),
            fmt_f64(r.residual),
            fmt_f64(r.c),
            fmt_f64(r.tau1),
            fmt_f64(r.tau2),
            fmt_f64(r.kappa_min),
            fmt_f64(r.p_min),
        ])?;
    }
    w.flush()?;
    Ok(())
}
