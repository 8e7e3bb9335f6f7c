//! Report records and their JSON and CSV encodings.

use std::collections::BTreeMap;

use corrdyn::interval::{decimal, Rounding};
use corrdyn::{Interval, Rat, Verdict};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

pub const SCHEMA_VERSION: &str = "1.0.0";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// The published JSON schema for reports.
pub const SCHEMA: &str = include_str!("../schema/report.schema.json");

/// Significant digits used when rendering exact values.
pub const DIGITS: usize = 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format '{s}', expected json or csv")),
        }
    }
}

/// A certified value: an enclosure `[lo, hi]`, an exact rational, or a flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Interval([String; 2]),
    Exact(String),
    Flag(bool),
}

impl Value {
    pub fn interval(i: &Interval) -> Self {
        Value::Interval(i.to_decimal_pair(DIGITS))
    }

    pub fn exact(x: &Rat) -> Self {
        Value::Exact(x.to_string())
    }

    fn render(&self) -> String {
        match self {
            Value::Interval([lo, hi]) => format!("[{lo},{hi}]"),
            Value::Exact(s) => s.clone(),
            Value::Flag(b) => b.to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Input,
    Precision,
    Numerical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecordError {
    pub kind: ErrorKind,
    pub message: String,
}

impl From<corrdyn::Error> for RecordError {
    fn from(e: corrdyn::Error) -> Self {
        let kind = match e {
            corrdyn::Error::Precision { .. } => ErrorKind::Precision,
            corrdyn::Error::Input(_) => ErrorKind::Input,
            _ => ErrorKind::Numerical,
        };
        RecordError { kind, message: e.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub check_id: String,
    pub sample_id: u64,
    /// Codimension, cohomological degree or parameter index, depending on the check.
    pub k: Option<usize>,
    pub inputs: BTreeMap<String, String>,
    pub verdict: Verdict,
    pub certified_values: BTreeMap<String, Value>,
    /// Exact ratios; rendered as decimals.
    pub ratios: BTreeMap<String, Rat>,
    pub saturation_events: usize,
    pub runtime_ms: u64,
    pub error: Option<RecordError>,
}

impl Record {
    pub fn new(check_id: &str, sample_id: u64, k: Option<usize>) -> Self {
        Record {
            check_id: check_id.to_string(),
            sample_id,
            k,
            inputs: BTreeMap::new(),
            verdict: Verdict::Pass,
            certified_values: BTreeMap::new(),
            ratios: BTreeMap::new(),
            saturation_events: 0,
            runtime_ms: 0,
            error: None,
        }
    }

    pub fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn value(&mut self, key: &str, value: Value) {
        self.certified_values.insert(key.to_string(), value);
    }

    pub fn ratio(&mut self, key: &str, value: Rat) {
        self.ratios.insert(key.to_string(), value);
    }

    pub fn failed(mut self, e: impl Into<RecordError>) -> Self {
        self.verdict = Verdict::Fail;
        self.error = Some(e.into());
        self
    }

    fn rendered_ratios(&self) -> BTreeMap<&str, String> {
        self.ratios.iter().map(|(k, v)| (k.as_str(), decimal(v, DIGITS, Rounding::Nearest))).collect()
    }
}

impl Serialize for Record {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Record", 10)?;
        st.serialize_field("check_id", &self.check_id)?;
        st.serialize_field("sample_id", &self.sample_id)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("inputs", &self.inputs)?;
        st.serialize_field("verdict", self.verdict.as_str())?;
        st.serialize_field("certified_values", &self.certified_values)?;
        st.serialize_field("ratios", &self.rendered_ratios())?;
        st.serialize_field("saturation_events", &self.saturation_events)?;
        st.serialize_field("runtime_ms", &self.runtime_ms)?;
        st.serialize_field("error", &self.error)?;
        st.end()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub expected_fail: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summary {
    pub counts: Counts,
    /// Largest value of each ratio over all records.
    pub ratio_suprema: BTreeMap<String, Rat>,
    pub precision_errors: usize,
}

impl Serialize for Summary {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let sup: BTreeMap<&str, String> =
            self.ratio_suprema.iter().map(|(k, v)| (k.as_str(), decimal(v, DIGITS, Rounding::Up))).collect();
        let mut st = s.serialize_struct("Summary", 3)?;
        st.serialize_field("counts", &self.counts)?;
        st.serialize_field("ratio_suprema", &sup)?;
        st.serialize_field("precision_errors", &self.precision_errors)?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub schema_version: String,
    pub tool_version: String,
    pub config_digest: String,
    pub suite: String,
    pub seed: u64,
    pub params: BTreeMap<String, serde_json::Value>,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn new(
        config_digest: &str,
        suite: &str,
        seed: u64,
        params: BTreeMap<String, serde_json::Value>,
        records: Vec<Record>,
    ) -> Self {
        let summary = summarize(&records);
        Report {
            schema_version: SCHEMA_VERSION.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            config_digest: config_digest.to_string(),
            suite: suite.to_string(),
            seed,
            params,
            records,
            summary,
        }
    }

    /// 3 on a precision-cap error, 1 on an unexpected fail, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.summary.precision_errors > 0 {
            3
        } else if self.summary.counts.fail > 0 {
            1
        } else {
            0
        }
    }

    pub fn supremum(&self, ratio: &str) -> Option<&Rat> {
        self.summary.ratio_suprema.get(ratio)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// One row per record, that is per (check, sample, k).
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "check_id",
            "sample_id",
            "k",
            "verdict",
            "inputs",
            "certified_values",
            "ratios",
            "saturation_events",
            "runtime_ms",
            "error",
        ])
        .expect("in-memory write");
        for r in &self.records {
            let join = |it: Vec<String>| it.join(";");
            w.write_record([
                r.check_id.clone(),
                r.sample_id.to_string(),
                r.k.map(|k| k.to_string()).unwrap_or_default(),
                r.verdict.as_str().to_string(),
                join(r.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect()),
                join(r.certified_values.iter().map(|(k, v)| format!("{k}={}", v.render())).collect()),
                join(r.rendered_ratios().iter().map(|(k, v)| format!("{k}={v}")).collect()),
                r.saturation_events.to_string(),
                r.runtime_ms.to_string(),
                r.error.as_ref().map(|e| e.message.clone()).unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn emit(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Json => self.to_json().into_bytes(),
            Format::Csv => self.to_csv().into_bytes(),
        }
    }
}

fn summarize(records: &[Record]) -> Summary {
    let mut counts = Counts::default();
    let mut ratio_suprema: BTreeMap<String, Rat> = BTreeMap::new();
    let mut precision_errors = 0;
    for r in records {
        match r.verdict {
            Verdict::Pass => counts.pass += 1,
            Verdict::Fail => counts.fail += 1,
            Verdict::Inconclusive => counts.inconclusive += 1,
            Verdict::ExpectedFail => counts.expected_fail += 1,
        }
        if r.error.as_ref().is_some_and(|e| e.kind == ErrorKind::Precision) {
            precision_errors += 1;
        }
        for (k, v) in &r.ratios {
            match ratio_suprema.get_mut(k) {
                Some(best) if *best >= *v => {}
                Some(best) => *best = v.clone(),
                None => {
                    ratio_suprema.insert(k.clone(), v.clone());
                }
            }
        }
    }
    Summary { counts, ratio_suprema, precision_errors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use corrdyn::ratio;

    #[test]
    fn empty_report_is_valid_json() {
        let r = Report::new("00", "ddc", 1, BTreeMap::new(), vec![]);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["records"].as_array().unwrap().len(), 0);
        assert_eq!(r.exit_code(), 0);
        assert_eq!(r.to_csv().lines().count(), 1);
    }

    #[test]
    fn suprema_and_exit_codes() {
        let mut a = Record::new("x", 0, None);
        a.ratio("r", ratio(1, 3));
        let mut b = Record::new("x", 1, None);
        b.ratio("r", ratio(2, 3));
        b.verdict = Verdict::Fail;
        let r = Report::new("00", "x", 1, BTreeMap::new(), vec![a, b]);
        assert_eq!(r.supremum("r"), Some(&ratio(2, 3)));
        assert_eq!(r.exit_code(), 1);
    }
}
