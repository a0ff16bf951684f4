use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::{CliError, Result};

/// One verified identity: its residual against the tolerance it must meet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// Which identity the residual measures, in words.
    pub anchor: String,
    #[serde(with = "nan_as_null")]
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub millis: u64,
}

impl CheckRecord {
    /// `pass` is derived here so that it always agrees with the residual; NaN never passes.
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, residual: f64, tolerance: f64, millis: u64) -> Self {
        Self { name: name.into(), anchor: anchor.into(), residual, tolerance, pass: residual <= tolerance, millis }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: RunConfig,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(CliError::UnknownFormat(other.to_string())),
        }
    }
}

pub fn emit_report(report: &VerificationReport, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        Format::Csv => {
            // written field by field so an empty report still gets its header
            let mut writer = csv::Writer::from_writer(Vec::new());
            writer.write_record(["name", "anchor", "residual", "tolerance", "pass", "millis"])?;
            for c in &report.checks {
                let residual = if c.residual.is_nan() { String::new() } else { format!("{:e}", c.residual) };
                writer.write_record([&c.name, &c.anchor, &residual, &format!("{:e}", c.tolerance), &c.pass.to_string(), &c.millis.to_string()])?;
            }
            let bytes = writer.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
        }
        Format::Text => Ok(text_table(report)),
    }
}

fn text_table(report: &VerificationReport) -> String {
    let rows: Vec<[String; 5]> = report
        .checks
        .iter()
        .map(|c| {
            [
                if c.pass { "PASS" } else { "FAIL" }.to_string(),
                c.name.clone(),
                format!("{:.3e}", c.residual),
                format!("{:.0e}", c.tolerance),
                format!("{} ms", c.millis),
            ]
        })
        .collect();
    let header = ["", "check", "residual", "tolerance", "time"].map(String::from);
    let mut widths = [0usize; 5];
    for row in std::iter::once(&header).chain(&rows) {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = format!("suite {} seed {}\n", report.config.suite, report.seed);
    for row in std::iter::once(&header).chain(&rows) {
        let line: Vec<String> = row.iter().zip(widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
        writeln!(out, "{}", line.join("  ").trim_end()).expect("writing to a string");
    }
    let failed = report.checks.iter().filter(|c| !c.pass).count();
    writeln!(out, "{} checks, {} failed", report.checks.len(), failed).expect("writing to a string");
    out
}

/// NaN residuals become json `null` and come back as NaN.
mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
        if value.is_nan() {
            s.serialize_none()
        } else {
            s.serialize_some(value)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}
