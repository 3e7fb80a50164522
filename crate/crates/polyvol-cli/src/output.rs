//! Output documents. Everything exact stays exact ("p/q" strings and
//! integer radicands); floats are display-only, rounded to 12 significant
//! digits. serde_json's default map keeps keys sorted, which is what the
//! canonical-output tests rely on.

use num_bigint::BigInt;
use polyvol::exact::{format_rat, Rat, RadicalValue};
use serde_json::{json, Value};

/// Round to 12 significant digits (the decimal formatter rounds half to
/// even); comparisons never happen on this value.
pub fn display_float(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float")
}

fn bigint_json(n: &BigInt) -> Value {
    match u64::try_from(n) {
        Ok(u) => json!(u),
        Err(_) => json!(n.to_string()),
    }
}

pub fn radical_json(v: &RadicalValue) -> Value {
    json!({
        "coeff": format_rat(&v.coeff),
        "radicand": bigint_json(&v.radicand),
    })
}

pub fn rat_json(r: &Rat) -> Value {
    json!(format_rat(r))
}

/// One method's result: {"diagnostics": [...], "float": ..., "method": ...,
/// "value": {...} | null}.
pub fn entry(method: &str, value: Value, float: f64, diagnostics: &[String]) -> Value {
    json!({
        "diagnostics": diagnostics,
        "float": display_float(float),
        "method": method,
        "value": value,
    })
}

pub fn print_doc(doc: &Value) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(doc).expect("serializable");
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{text}").is_err() {
        // downstream closed the pipe; the document cannot be delivered
        std::process::exit(0);
    }
}
