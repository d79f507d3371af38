//! Structured reports: one JSON object per task, fields in a fixed order.
//!
//! Exact results are DSL text, floating-point results are shortest
//! round-trip decimal strings, and every record carries a `status` of
//! `pass`, `fail`, `computed` or `error`.

use serde_json::{Map, Value};

pub const SCHEMA: &str = "thetahat-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Computed,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Computed => "computed",
            Status::Error => "error",
        }
    }

    pub fn from_check(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn is_success(self) -> bool {
        matches!(self, Status::Pass | Status::Computed)
    }
}

/// Fields of one task record, in insertion order.
#[derive(Clone, Debug)]
pub struct Record {
    pub status: Status,
    fields: Map<String, Value>,
}

impl Record {
    pub fn new(task: &str) -> Record {
        let mut fields = Map::new();
        fields.insert("task".into(), Value::from(task));
        fields.insert("status".into(), Value::Null);
        Record {
            status: Status::Computed,
            fields,
        }
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.into(), v.into());
        self
    }

    pub fn text(&mut self, key: &str, v: impl ToString) -> &mut Self {
        self.set(key, v.to_string())
    }

    /// A float as its shortest round-trip decimal string.
    pub fn float(&mut self, key: &str, v: f64) -> &mut Self {
        self.set(key, format_float(v))
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.get(key)
    }

    pub fn to_value(&self) -> Value {
        let mut out = self.fields.clone();
        out.insert("status".into(), Value::from(self.status.as_str()));
        Value::Object(out)
    }
}

pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        // no negative zero in reports
        return "0".into();
    }
    format!("{v:?}")
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub records: Vec<Record>,
}

impl Report {
    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn success(&self) -> bool {
        self.records.iter().all(|r| r.status.is_success())
    }

    pub fn to_value(&self) -> Value {
        let count = |s: Status| self.records.iter().filter(|r| r.status == s).count();
        let mut summary = Map::new();
        for s in [Status::Pass, Status::Fail, Status::Computed, Status::Error] {
            summary.insert(s.as_str().into(), Value::from(count(s)));
        }
        let mut out = Map::new();
        out.insert("schema".into(), Value::from(SCHEMA));
        out.insert("success".into(), Value::from(self.success()));
        out.insert("summary".into(), Value::Object(summary));
        out.insert(
            "tasks".into(),
            Value::Array(self.records.iter().map(Record::to_value).collect()),
        );
        Value::Object(out)
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("report values serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_order_is_stable() {
        let mut r = Record::new("verify-closed");
        r.set("n", 4).set("k", 2).float("wall_time", 0.5);
        r.status = Status::Pass;
        let mut rep = Report::default();
        rep.push(r);
        let text = rep.render();
        let n = text.find("\"n\"").unwrap();
        let k = text.find("\"k\"").unwrap();
        let status = text.find("\"status\"").unwrap();
        assert!(status < n && n < k);
        assert!(text.contains("\"wall_time\": \"0.5\""));
        assert!(rep.success());
    }

    #[test]
    fn floats_round_trip() {
        for v in [0.1, -3.0000464525253276, 1e-300, 7.0 / 3.0] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_float(-0.0), "0");
    }
}
