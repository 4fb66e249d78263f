//! Report envelope and JSON / CSV emission.

use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// Every exact identity checked held.
    Pass,
    Fail,
    Inconclusive,
    /// A computation with nothing to check.
    Report,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass | Outcome::Report => 0,
            Outcome::Fail => 1,
            Outcome::Inconclusive => 3,
        }
    }

    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    config: &'a RunConfig,
    outcome: Outcome,
    result: &'a Value,
}

pub fn render(cfg: &RunConfig, outcome: Outcome, result: &Value) -> String {
    match cfg.format {
        Format::Json => {
            let env = Envelope { config: cfg, outcome, result };
            serde_json::to_string_pretty(&env).expect("reports serialize") + "\n"
        }
        Format::Csv => to_csv(result),
    }
}

fn cell(v: &Value) -> String {
    let s = match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(_) | Value::Number(_) => v.to_string(),
        _ => v.to_string(),
    };
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

/// The first array of objects in the report becomes the table; otherwise the
/// top-level fields are written as `key,value` rows.
fn to_csv(result: &Value) -> String {
    let rows = match result {
        Value::Array(a) => Some(a),
        Value::Object(m) => m.values().find_map(|v| match v {
            Value::Array(a) if a.first().is_some_and(Value::is_object) => Some(a),
            _ => None,
        }),
        _ => None,
    };
    let mut out = String::new();
    match rows {
        Some(rows) if rows.first().is_some_and(Value::is_object) => {
            let cols: Vec<String> = rows[0].as_object().unwrap().keys().cloned().collect();
            out.push_str(&cols.join(","));
            out.push('\n');
            for r in rows {
                let line: Vec<String> = cols.iter().map(|c| cell(r.get(c).unwrap_or(&Value::Null))).collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
        }
        _ => {
            out.push_str("key,value\n");
            if let Value::Object(m) = result {
                for (k, v) in m {
                    out.push_str(&format!("{k},{}\n", cell(v)));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_tables_and_scalars() {
        let t = json!({"n": 1, "rows": [{"a": "1/2", "b": "x,y"}, {"a": "3", "b": null}]});
        assert_eq!(to_csv(&t), "a,b\n1/2,\"x,y\"\n3,\n");
        assert_eq!(to_csv(&json!({"value": "4/3"})), "key,value\nvalue,4/3\n");
    }
}
