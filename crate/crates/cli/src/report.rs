//! Command output: parameters, result rows and oracle checks, rendered as
//! CSV or JSON.

use serde_json::{json, Map, Value as Json};

use crate::table::{Table, Value};

/// One oracle-versus-closed-form comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub tolerance: f64,
    pub deviation: f64,
}

impl Check {
    /// Stores `|deviation|`.
    pub fn new(name: &str, tolerance: f64, deviation: f64) -> Self {
        Check {
            name: name.into(),
            tolerance,
            deviation: deviation.abs(),
        }
    }

    /// NaN deviations fail.
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

/// Whether `results` is a single record or a series of points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Single,
    Series,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub params: Vec<(String, Value)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub layout: Layout,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn single(command: &'static str, params: Vec<(String, Value)>, fields: Vec<(&str, Value)>) -> Self {
        let (columns, row): (Vec<String>, Vec<Value>) = fields.into_iter().map(|(k, v)| (k.to_string(), v)).unzip();
        Report {
            command,
            params,
            columns,
            rows: vec![row],
            layout: Layout::Single,
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    /// CSV with `#` metadata lines. Reports with checks tabulate the checks.
    pub fn to_table(&self) -> Table {
        let mut comments = vec![
            format!("decoh {}", env!("CARGO_PKG_VERSION")),
            format!("command: {}", self.command),
        ];
        comments.extend(self.params.iter().map(|(k, v)| format!("{k}: {}", v.render())));
        comments.extend(self.notes.iter().map(|n| format!("note: {n}")));
        if self.checks.is_empty() {
            return Table {
                comments,
                header: self.columns.clone(),
                rows: self.rows.clone(),
            };
        }
        for row in &self.rows {
            for (k, v) in self.columns.iter().zip(row) {
                comments.push(format!("{k}: {}", v.render()));
            }
        }
        Table {
            comments,
            header: ["check", "tolerance", "deviation", "passed"].map(String::from).to_vec(),
            rows: self
                .checks
                .iter()
                .map(|c| {
                    vec![
                        Value::from(c.name.as_str()),
                        c.tolerance.into(),
                        c.deviation.into(),
                        c.passed().into(),
                    ]
                })
                .collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        self.to_table().to_csv()
    }

    fn record(&self, row: &[Value]) -> Json {
        Json::Object(
            self.columns
                .iter()
                .zip(row)
                .map(|(k, v)| (k.clone(), v.to_json()))
                .collect::<Map<_, _>>(),
        )
    }

    pub fn to_json(&self) -> Json {
        let mut params: Map<String, Json> = self.params.iter().map(|(k, v)| (k.clone(), v.to_json())).collect();
        params.insert("command".into(), Json::String(self.command.into()));
        params.insert("version".into(), Json::String(env!("CARGO_PKG_VERSION").into()));
        let results = match self.layout {
            Layout::Single => self.rows.first().map_or(json!({}), |r| self.record(r)),
            Layout::Series => json!({ "points": self.rows.iter().map(|r| self.record(r)).collect::<Vec<_>>() }),
        };
        let checks: Vec<Json> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "tolerance": Value::Num(c.tolerance).to_json(),
                    "deviation": Value::Num(c.deviation).to_json(),
                    "passed": c.passed(),
                })
            })
            .collect();
        let mut top = json!({ "params": params, "results": results, "checks": checks });
        if !self.notes.is_empty() {
            top["notes"] = json!(self.notes);
        }
        top
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable report");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_deviation_fails() {
        assert!(!Check::new("x", 1.0, f64::NAN).passed());
        assert!(Check::new("x", 1.0, 1.0).passed());
    }

    #[test]
    fn json_layout() {
        let mut r = Report::single("error", vec![("delta".into(), 0.01.into())], vec![("a", 0.5.into()), ("regime", "small".into())]);
        let j = r.to_json();
        assert_eq!(j["results"]["a"], json!(0.5));
        assert_eq!(j["params"]["command"], json!("error"));
        r.layout = Layout::Series;
        assert_eq!(r.to_json()["results"]["points"][0]["regime"], json!("small"));
    }
}
