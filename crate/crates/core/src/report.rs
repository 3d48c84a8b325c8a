//! Verification reports: one row per checked identity instance.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Map, Value as Json};

use crate::arith::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotApplicable => "not-applicable",
        }
    }

    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// A side of an identity: exact, floating, or absent.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(Rational),
    Approx(f64),
    Missing,
}

/// Floats are written with 17 significant digits so output is reproducible.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl Value {
    pub fn render(&self) -> String {
        match self {
            Value::Exact(r) => r.to_string(),
            Value::Approx(x) => format_float(*x),
            Value::Missing => "-".to_string(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Exact(r) => Some(crate::averages::rational_to_f64(r)),
            Value::Approx(x) => Some(*x),
            Value::Missing => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub identity: String,
    pub params: BTreeMap<String, String>,
    pub lhs: Value,
    pub rhs: Value,
    pub residual: Option<f64>,
    pub status: Status,
    pub note: Option<String>,
}

impl ReportRow {
    pub fn new(
        identity: &str,
        lhs: Value,
        rhs: Value,
        residual: Option<f64>,
        status: Status,
    ) -> Self {
        ReportRow {
            identity: identity.to_string(),
            params: BTreeMap::new(),
            lhs,
            rhs,
            residual,
            status,
            note: None,
        }
    }

    pub fn not_applicable(identity: &str, note: &str) -> Self {
        let mut row = Self::new(
            identity,
            Value::Missing,
            Value::Missing,
            None,
            Status::NotApplicable,
        );
        row.note = Some(note.to_string());
        row
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    fn params_string(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn to_json(&self) -> Json {
        let params: Map<String, Json> = self
            .params
            .iter()
            .map(|(k, v)| (k.clone(), Json::String(v.clone())))
            .collect();
        json!({
            "identity": self.identity,
            "params": params,
            "lhs": self.lhs.render(),
            "rhs": self.rhs.render(),
            "residual": self.residual.map(format_float),
            "status": self.status.as_str(),
            "note": self.note,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerificationReport {
    pub level: u64,
    pub rows: Vec<ReportRow>,
}

impl VerificationReport {
    pub fn new(level: u64) -> Self {
        VerificationReport {
            level,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.rows.extend(other.rows);
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.status == Status::Fail)
    }

    /// Rows whose identity name equals `name`.
    pub fn rows_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a ReportRow> + 'a {
        self.rows.iter().filter(move |r| r.identity == name)
    }

    pub fn identities_json(&self) -> Json {
        Json::Array(self.rows.iter().map(ReportRow::to_json).collect())
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<22} {:<22} {:>26} {:>26} {:>12}  status",
            "identity", "params", "lhs", "rhs", "residual"
        );
        for r in &self.rows {
            let _ = write!(
                out,
                "{:<22} {:<22} {:>26} {:>26} {:>12}  {}",
                r.identity,
                r.params_string(),
                short(&r.lhs),
                short(&r.rhs),
                r.residual
                    .map(|x| format!("{x:.2e}"))
                    .unwrap_or_else(|| "-".into()),
                r.status.as_str()
            );
            if let Some(note) = &r.note {
                let _ = write!(out, "  [{note}]");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,identity,params,lhs,rhs,residual,status,note\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                self.level,
                r.identity,
                csv_field(&r.params_string()),
                r.lhs.render(),
                r.rhs.render(),
                r.residual.map(format_float).unwrap_or_default(),
                r.status.as_str(),
                csv_field(r.note.as_deref().unwrap_or(""))
            );
        }
        out
    }
}

fn short(v: &Value) -> String {
    match v {
        Value::Approx(x) => format!("{x:.15}"),
        other => other.render(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn status_follows_failures() {
        let mut rep = VerificationReport::new(11);
        rep.push(ReportRow::new(
            "a",
            Value::Exact(rat(1, 5)),
            Value::Exact(rat(1, 5)),
            Some(0.0),
            Status::Pass,
        ));
        rep.push(ReportRow::not_applicable("b", "empty"));
        assert!(rep.all_pass());
        rep.push(ReportRow::new(
            "c",
            Value::Approx(0.1),
            Value::Approx(0.2),
            Some(0.1),
            Status::Fail,
        ));
        assert!(!rep.all_pass());
        assert_eq!(rep.failures().count(), 1);
    }

    #[test]
    fn csv_and_json_shapes() {
        let mut rep = VerificationReport::new(37);
        rep.push(
            ReportRow::new(
                "cor46",
                Value::Exact(rat(2, 3)),
                Value::Exact(rat(2, 3)),
                Some(0.0),
                Status::Pass,
            )
            .param("m", 1)
            .with_note("a, b"),
        );
        let csv = rep.to_csv();
        assert!(csv
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("37,cor46,m=1,2/3,2/3,"));
        assert!(csv.contains("\"a, b\""));
        let js = rep.identities_json();
        assert_eq!(js[0]["lhs"], "2/3");
        assert_eq!(js[0]["status"], "pass");
        assert_eq!(js[0]["residual"], "0.0000000000000000e0");
    }
}
