//! Number formatting and document emission.

use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::error::CliError;

/// Significant digits kept for every float in JSON, CSV and SVG output.
pub const SIG_DIGITS: usize = 12;

/// Rounds to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().expect("valid float")
}

/// Shortest text for the rounded value; empty for non-finite input.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return String::new();
    }
    let r = round_sig(x);
    if r == r.trunc() && r.abs() < 1e15 {
        format!("{}", r as i64)
    } else {
        format!("{r}")
    }
}

/// Rounds every float inside a JSON document in place.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64"));
            *v = serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn to_json_doc<T: serde::Serialize>(value: &T) -> Result<Value, CliError> {
    let mut v = serde_json::to_value(value).map_err(|e| CliError::Internal(e.to_string()))?;
    round_floats(&mut v);
    Ok(v)
}

/// Writes `bytes` to `out` or stdout.
pub fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

pub fn emit_json(doc: &Value, out: Option<&Path>) -> Result<(), CliError> {
    let mut bytes = serde_json::to_vec(doc).map_err(|e| CliError::Internal(e.to_string()))?;
    bytes.push(b'\n');
    emit(&bytes, out)
}
