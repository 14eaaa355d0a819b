//! Line-delimited JSON records with a fixed field order.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which round-trips
//! every `f64` exactly; non-finite values become `null`.

use std::fmt::Write as _;

use serde_json::Value;

use crate::error::{CliError, CliResult};

pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".into()
    }
}

/// Builds one JSON object, preserving insertion order.
#[derive(Debug, Default)]
pub struct ObjectWriter {
    buf: String,
}

impl ObjectWriter {
    pub fn new() -> Self {
        Self { buf: String::from("{") }
    }

    fn key(&mut self, key: &str) {
        if self.buf.len() > 1 {
            self.buf.push(',');
        }
        let _ = write!(self.buf, "{}:", Value::String(key.into()));
    }

    pub fn str(mut self, key: &str, v: &str) -> Self {
        self.key(key);
        let _ = write!(self.buf, "{}", Value::String(v.into()));
        self
    }

    pub fn int(mut self, key: &str, v: u64) -> Self {
        self.key(key);
        let _ = write!(self.buf, "{v}");
        self
    }

    pub fn float(mut self, key: &str, v: f64) -> Self {
        self.key(key);
        self.buf.push_str(&fmt_f64(v));
        self
    }

    pub fn opt_float(self, key: &str, v: Option<f64>) -> Self {
        match v {
            Some(x) => self.float(key, x),
            None => self.raw(key, "null"),
        }
    }

    pub fn bool(mut self, key: &str, v: bool) -> Self {
        self.key(key);
        self.buf.push_str(if v { "true" } else { "false" });
        self
    }

    /// Inserts pre-rendered JSON.
    pub fn raw(mut self, key: &str, json: &str) -> Self {
        self.key(key);
        self.buf.push_str(json);
        self
    }

    pub fn finish(mut self) -> String {
        self.buf.push('}');
        self.buf
    }
}

pub fn json_array(items: &[String]) -> String {
    format!("[{}]", items.join(","))
}

/// Reads line `line` (1-based) of `path` as a JSON object.
pub fn read_record(path: &str, line: usize) -> CliResult<Value> {
    let text = std::fs::read_to_string(path)?;
    let raw = text
        .lines()
        .nth(line.checked_sub(1).ok_or_else(|| CliError::Argument("line numbers start at 1".into()))?)
        .ok_or_else(|| CliError::Argument(format!("{path} has no line {line}")))?;
    let value: Value =
        serde_json::from_str(raw).map_err(|e| CliError::Argument(format!("{path}:{line} is not JSON: {e}")))?;
    if !value.is_object() {
        return Err(CliError::Argument(format!("{path}:{line} is not a record object")));
    }
    Ok(value)
}

/// Splits `FILE:LINE` at the last colon.
pub fn parse_location(spec: &str) -> CliResult<(String, usize)> {
    let (file, line) = spec
        .rsplit_once(':')
        .ok_or_else(|| CliError::Argument(format!("expected FILE:LINE, got {spec}")))?;
    let line = line
        .parse()
        .map_err(|_| CliError::Argument(format!("bad line number in {spec}")))?;
    Ok((file.to_string(), line))
}

pub fn field<'a>(v: &'a Value, key: &str) -> CliResult<&'a Value> {
    v.get(key).ok_or_else(|| CliError::Argument(format!("record has no field {key}")))
}

pub fn field_u64(v: &Value, key: &str) -> CliResult<u64> {
    field(v, key)?
        .as_u64()
        .ok_or_else(|| CliError::Argument(format!("field {key} is not an unsigned integer")))
}

pub fn field_str<'a>(v: &'a Value, key: &str) -> CliResult<&'a str> {
    field(v, key)?
        .as_str()
        .ok_or_else(|| CliError::Argument(format!("field {key} is not a string")))
}

pub fn field_f64(v: &Value, key: &str) -> CliResult<f64> {
    field(v, key)?
        .as_f64()
        .ok_or_else(|| CliError::Argument(format!("field {key} is not a number")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE, -0.0] {
            let s = fmt_f64(v);
            let back: f64 = serde_json::from_str::<Value>(&s).unwrap().as_f64().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(f64::NAN), "null");
    }

    #[test]
    fn object_field_order() {
        let s = ObjectWriter::new().str("kind", "x").int("n", 3).float("F", 0.5).bool("ok", true).finish();
        assert_eq!(s, r#"{"kind":"x","n":3,"F":5.0000000000000000e-1,"ok":true}"#);
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(field_u64(&v, "n").unwrap(), 3);
        assert_eq!(field_str(&v, "kind").unwrap(), "x");
    }

    #[test]
    fn location_parsing() {
        assert_eq!(parse_location("out/a.jsonl:12").unwrap(), ("out/a.jsonl".into(), 12));
        assert!(parse_location("nocolon").is_err());
        assert!(parse_location("f:x").is_err());
    }
}
