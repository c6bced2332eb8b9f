//! Cell values, number formatting and the CSV table format.

use serde_json::Value as Json;

/// 12 significant digits, e.g. `1.23456789012e-4`.
pub fn format_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.11e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl Value {
    pub fn render(&self) -> String {
        match self {
            Value::Num(v) => format_num(*v),
            Value::Int(v) => v.to_string(),
            Value::Bool(v) => v.to_string(),
            Value::Text(s) => s.clone(),
        }
    }

    /// Inverse of [`render`](Self::render).
    pub fn parse(s: &str) -> Value {
        if let Ok(i) = s.parse::<i64>() {
            return Value::Int(i);
        }
        match s {
            "true" => return Value::Bool(true),
            "false" => return Value::Bool(false),
            "nan" => return Value::Num(f64::NAN),
            "inf" => return Value::Num(f64::INFINITY),
            "-inf" => return Value::Num(f64::NEG_INFINITY),
            _ => {}
        }
        if s.contains(['e', '.']) {
            if let Ok(v) = s.parse::<f64>() {
                return Value::Num(v);
            }
        }
        Value::Text(s.to_string())
    }

    /// JSON with numbers rounded to 12 significant digits; non-finite
    /// numbers become `null`.
    pub fn to_json(&self) -> Json {
        match self {
            Value::Num(v) if v.is_finite() => {
                let rounded: f64 = format_num(*v).parse().expect("formatted float parses");
                serde_json::Number::from_f64(rounded).map_or(Json::Null, Json::Number)
            }
            Value::Num(_) => Json::Null,
            Value::Int(v) => Json::from(*v),
            Value::Bool(v) => Json::Bool(*v),
            Value::Text(s) => Json::String(s.clone()),
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

/// `#` comment lines, a header row and data rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Value::render)).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells"));
        out
    }

    pub fn parse(text: &str) -> Result<Table, String> {
        let mut comments = Vec::new();
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            match line.strip_prefix('#') {
                Some(c) => {
                    let c = c.trim_end_matches('\n');
                    comments.push(c.strip_prefix(' ').unwrap_or(c).to_string());
                    body_start += line.len();
                }
                None => break,
            }
        }
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text[body_start..].as_bytes());
        let header = r
            .headers()
            .map_err(|e| e.to_string())?
            .iter()
            .map(String::from)
            .collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(Value::parse).collect()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        Ok(Table { comments, header, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_num(0.714_212_839_142_507_2), "7.14212839143e-1");
        assert_eq!(format_num(1e-4), "1.00000000000e-4");
        assert_eq!(format_num(f64::INFINITY), "inf");
    }

    #[test]
    fn values_round_trip() {
        for v in [
            Value::Num(1.234e-300),
            Value::Num(-5.0),
            Value::Num(f64::NEG_INFINITY),
            Value::Int(61),
            Value::Bool(true),
            Value::Text("crossover".into()),
        ] {
            assert_eq!(Value::parse(&v.render()).render(), v.render());
        }
        assert_eq!(Value::Num(f64::INFINITY).to_json(), Json::Null);
        assert_eq!(Value::Num(0.1 + 0.2).to_json(), serde_json::json!(0.3));
    }

    #[test]
    fn csv_round_trip() {
        let t = Table {
            comments: vec!["decoh 0.1.0".into(), "k: v, with comma".into()],
            header: vec!["a".into(), "b".into(), "c".into()],
            rows: vec![
                vec![Value::Num(0.5), Value::Text("x, y".into()), Value::Int(3)],
                vec![Value::Num(f64::NAN), Value::Bool(false), Value::Int(-1)],
            ],
        };
        let text = t.to_csv();
        let parsed = Table::parse(&text).unwrap();
        assert_eq!(parsed.to_csv(), text);
        assert_eq!(parsed.comments, t.comments);
    }
}
