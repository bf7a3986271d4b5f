//! JSON report envelope: rounded values up front, full precision under
//! `exact`.

use std::collections::BTreeSet;

use fverify::{Flag, VerifyError};
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;
const DECIMALS: f64 = 1e6;

pub struct Report {
    command: &'static str,
    body: Map<String, Value>,
    flags: BTreeSet<Flag>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report { command, body: Map::new(), flags: BTreeSet::new() }
    }

    pub fn insert(&mut self, key: &str, value: impl Into<Value>) {
        self.body.insert(key.to_owned(), value.into());
    }

    pub fn flag(&mut self, flag: Flag) {
        self.flags.insert(flag);
    }

    pub fn flags<'a>(&mut self, flags: impl IntoIterator<Item = &'a Flag>) {
        self.flags.extend(flags);
    }

    pub fn is_degenerate(&self) -> bool {
        self.flags.iter().any(|f| f.is_degenerate())
    }

    /// Pretty JSON with a trailing newline.
    pub fn render(&self) -> String {
        let mut out = Map::new();
        out.insert("schema_version".into(), SCHEMA_VERSION.into());
        out.insert("command".into(), self.command.into());
        for (k, v) in &self.body {
            out.insert(k.clone(), rounded(v));
        }
        let flags = self.flags.iter().map(|f| serde_json::to_value(f).expect("flags serialize")).collect();
        out.insert("flags".into(), Value::Array(flags));
        out.insert("exact".into(), Value::Object(self.body.clone()));
        let mut text = serde_json::to_string_pretty(&Value::Object(out)).expect("JSON values serialize");
        text.push('\n');
        text
    }
}

/// Six decimal places, applied to every non-integer number.
fn rounded(value: &Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => round6(n.as_f64().expect("f64 number")).into(),
        Value::Array(items) => Value::Array(items.iter().map(rounded).collect()),
        Value::Object(map) => Value::Object(map.iter().map(|(k, v)| (k.clone(), rounded(v))).collect()),
        other => other.clone(),
    }
}

fn round6(x: f64) -> f64 {
    if x.abs() >= 1e9 {
        return x;
    }
    let r = (x * DECIMALS).round() / DECIMALS;
    // no "-0.0" in reports
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// The flag a failed statistic reports instead of aborting the run, if the
/// error is of the degenerate kind.
pub fn degenerate_flag(err: &VerifyError) -> Option<Flag> {
    match err {
        VerifyError::DegenerateUncertainty => Some(Flag::DegenerateUncertainty),
        VerifyError::DegenerateClass => Some(Flag::DegenerateClass),
        VerifyError::DegenerateVariance => Some(Flag::DegenerateVariance),
        VerifyError::ZeroVariance => Some(Flag::ZeroVariance),
        VerifyError::SeparationDetected { .. } => Some(Flag::SeparationDetected),
        VerifyError::NotConverged => Some(Flag::NotConverged),
        VerifyError::DegenerateInput(_) => Some(Flag::DegenerateInput),
        _ => None,
    }
}

/// `null` for non-finite values and absent options.
pub fn num(x: impl Into<Option<f64>>) -> Value {
    match x.into() {
        Some(v) if v.is_finite() => v.into(),
        _ => Value::Null,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding_keeps_integers_and_prints_short_decimals() {
        let v = rounded(&json!({"a": 0.15333333333333332, "n": 3, "z": -1e-9, "xs": [0.0866666666]}));
        assert_eq!(v.to_string(), r#"{"a":0.153333,"n":3,"z":0.0,"xs":[0.086667]}"#);
    }

    #[test]
    fn envelope_carries_version_flags_and_exact_copy() {
        let mut r = Report::new("score");
        r.insert("value", 1.0 / 3.0);
        r.flag(Flag::HeuristicProfile);
        assert!(!r.is_degenerate());
        let v: Value = serde_json::from_str(&r.render()).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["value"], 0.333333);
        assert_eq!(v["exact"]["value"], 1.0 / 3.0);
        assert_eq!(v["flags"], json!(["heuristic_profile"]));
        r.flag(Flag::DegenerateClass);
        assert!(r.is_degenerate());
    }

    #[test]
    fn non_finite_numbers_become_null() {
        assert_eq!(num(f64::NAN), Value::Null);
        assert_eq!(num(None), Value::Null);
        assert_eq!(num(0.5), json!(0.5));
    }
}
