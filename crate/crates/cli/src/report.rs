//! One JSON object per check, plus CSV tables for plotting.

use serde_json::{json, Map, Value};

#[derive(Clone, Debug)]
pub enum Outcome {
    /// Pass iff `residual < tolerance`.
    Residual { residual: f64, tolerance: f64 },
    /// Pass iff `lo <= value <= hi`; `r2` is reported alongside when the value is a fit slope.
    Band { value: f64, lo: f64, hi: f64, r2: Option<f64> },
    /// Pass iff the flag holds (structural checks).
    Flag(bool),
}

impl Outcome {
    pub fn pass(&self) -> bool {
        match self {
            // NaN never passes
            Outcome::Residual { residual, tolerance } => *residual < *tolerance,
            Outcome::Band { value, lo, hi, .. } => *lo <= *value && *value <= *hi,
            Outcome::Flag(b) => *b,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub check: String,
    pub params: Map<String, Value>,
    pub outcome: Outcome,
    /// Producing routine in the library.
    pub provenance: &'static str,
    pub detail: Option<Value>,
    pub wall_ms: Option<u128>,
}

fn num(x: f64) -> Value {
    // JSON has no inf/NaN
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

impl CheckReport {
    pub fn new(check: &str, params: &Map<String, Value>, outcome: Outcome, provenance: &'static str) -> Self {
        CheckReport { check: check.to_string(), params: params.clone(), outcome, provenance, detail: None, wall_ms: None }
    }

    pub fn pass(&self) -> bool {
        self.outcome.pass()
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("check".into(), json!(self.check));
        m.insert("params".into(), Value::Object(self.params.clone()));
        match &self.outcome {
            Outcome::Residual { residual, tolerance } => {
                m.insert("residual".into(), num(*residual));
                m.insert("tolerance".into(), num(*tolerance));
            }
            Outcome::Band { value, lo, hi, r2 } => {
                let mut f = Map::new();
                f.insert("value".into(), num(*value));
                f.insert("band".into(), json!([num(*lo), num(*hi)]));
                if let Some(r2) = r2 {
                    f.insert("r2".into(), num(*r2));
                }
                m.insert("fit".into(), Value::Object(f));
            }
            Outcome::Flag(b) => {
                m.insert("holds".into(), json!(b));
            }
        }
        m.insert("pass".into(), json!(self.pass()));
        m.insert("provenance".into(), json!(self.provenance));
        if let Some(d) = &self.detail {
            m.insert("detail".into(), d.clone());
        }
        if let Some(t) = self.wall_ms {
            m.insert("wall_ms".into(), json!(t));
        }
        Value::Object(m)
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("report serializes")
    }
}

/// A `k, value, ...` table.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&'static str]) -> Self {
        Table { name: name.to_string(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_rules() {
        assert!(Outcome::Residual { residual: 1e-30, tolerance: 1e-20 }.pass());
        assert!(!Outcome::Residual { residual: f64::NAN, tolerance: 1e-20 }.pass());
        assert!(!Outcome::Band { value: 4.5, lo: 3.7, hi: 4.3, r2: None }.pass());
        let r = CheckReport::new("a.b", &Map::new(), Outcome::Residual { residual: f64::INFINITY, tolerance: 1.0 }, "x");
        assert_eq!(r.to_line(), r#"{"check":"a.b","params":{},"pass":false,"provenance":"x","residual":"inf","tolerance":1.0}"#);
    }
}
