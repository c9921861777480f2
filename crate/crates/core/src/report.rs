//! Experiment reports: check tables, JSON with 17 significant digits, and
//! flat CSV.

use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// How `computed` is compared against `expected`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|computed − expected| ≤ tolerance`
    Absolute,
    /// `|computed − expected| ≤ tolerance·|expected|`
    Relative,
    /// `computed ≤ expected`
    AtMost,
    /// `computed ≥ expected`
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(deserialize_with = "null_as_nan")]
    pub computed: f64,
    #[serde(deserialize_with = "null_as_nan")]
    pub expected: f64,
    #[serde(deserialize_with = "null_as_nan")]
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    /// Where the expected value comes from.
    pub provenance: String,
}

/// JSON has no NaN; non-finite values are written as `null`.
fn null_as_nan<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

impl Check {
    pub fn new(name: impl Into<String>, computed: f64, expected: f64, tolerance: f64, comparison: Comparison) -> Self {
        let pass = match comparison {
            Comparison::Absolute => (computed - expected).abs() <= tolerance,
            Comparison::Relative => (computed - expected).abs() <= tolerance * expected.abs(),
            Comparison::AtMost => computed <= expected + tolerance,
            Comparison::AtLeast => computed >= expected - tolerance,
        };
        Check { name: name.into(), computed, expected, tolerance, comparison, pass, provenance: String::new() }
    }

    pub fn exact(name: impl Into<String>, computed: f64, expected: f64) -> Self {
        Check::new(name, computed, expected, 0.0, Comparison::Absolute)
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Check::exact(name, ok as u8 as f64, 1.0)
    }

    /// A check that could not be evaluated.
    pub fn failed(name: impl Into<String>, expected: f64, why: &Error) -> Self {
        let mut c = Check::exact(name, f64::NAN, expected);
        c.pass = false;
        c.provenance = format!("not evaluated: {why}");
        c
    }

    pub fn with_provenance(mut self, p: impl Into<String>) -> Self {
        if self.provenance.is_empty() {
            self.provenance = p.into();
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: serde_json::Value,
    pub checks: Vec<Check>,
    /// Free-form diagnostics (sweeps, pole lists, cochain term tables).
    pub details: serde_json::Value,
    pub notes: Vec<String>,
    pub verdict: bool,
    pub wall_clock_seconds: f64,
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>, config: serde_json::Value) -> Self {
        ExperimentReport {
            experiment: experiment.into(),
            config,
            checks: Vec::new(),
            details: serde_json::Value::Object(Default::default()),
            notes: Vec::new(),
            verdict: true,
            wall_clock_seconds: 0.0,
        }
    }

    pub fn push(&mut self, c: Check) {
        self.verdict &= c.pass;
        self.checks.push(c);
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        if let serde_json::Value::Object(m) = &mut self.details {
            m.insert(key.into(), serde_json::to_value(value).unwrap_or(serde_json::Value::Null));
        }
    }

    pub fn recompute_verdict(&mut self) {
        self.verdict = self.checks.iter().all(|c| c.pass);
    }

    pub fn to_json(&self) -> Result<String> {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits::default());
        self.serialize(&mut ser).map_err(|e| Error::Config(e.to_string()))?;
        buf.push(b'\n');
        String::from_utf8(buf).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    /// One row per check: name, computed, expected, tol, pass.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::Config(e.to_string());
        w.write_record(["name", "computed", "expected", "tol", "pass"]).map_err(err)?;
        for c in &self.checks {
            w.write_record([
                c.name.clone(),
                fmt17(c.computed),
                fmt17(c.expected),
                fmt17(c.tolerance),
                c.pass.to_string(),
            ])
            .map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn emit(&self, path: &Path, format: Format) -> Result<()> {
        let text = match format {
            Format::Json => self.to_json()?,
            Format::Csv => self.to_csv()?,
        };
        std::fs::write(path, text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Config(format!("unknown format {s:?} (json or csv)"))),
        }
    }
}

/// `x` with 17 significant digits; non-finite values as `NaN`/`inf`.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Pretty JSON formatter writing every float with 17 significant digits.
#[derive(Default)]
struct SigDigits(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt17(value).as_bytes())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}
