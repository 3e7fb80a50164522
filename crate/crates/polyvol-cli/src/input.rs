//! JSON problem files, inline argument parsing, and the canonical
//! serialization used by the round-trip tests. All schema errors name the
//! offending location by JSON path ($.b[0] and the like).

use polyvol::exact::{format_rat, parse_rat, Rat, RatMatrix};
use polyvol::{DirectionMatrix, ExponentVector, HPolytope, Polynomial};
use serde_json::{json, Value};

pub type CliResult<T> = Result<T, String>;

pub fn load_json(path: &std::path::Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("invalid JSON in {}: {e}", path.display()))
}

fn field<'a>(v: &'a Value, key: &str, path: &str) -> CliResult<&'a Value> {
    let obj = v
        .as_object()
        .ok_or_else(|| format!("expected an object at {path}"))?;
    obj.get(key)
        .ok_or_else(|| format!("missing field {path}.{key}"))
}

fn rat_at(v: &Value, path: &str) -> CliResult<Rat> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
        _ => return Err(format!("expected a rational string at {path}")),
    };
    parse_rat(&text).map_err(|e| format!("parse error at {path}: {e}"))
}

fn rat_vec(v: &Value, path: &str) -> CliResult<Vec<Rat>> {
    let arr = v
        .as_array()
        .ok_or_else(|| format!("expected an array at {path}"))?;
    arr.iter()
        .enumerate()
        .map(|(i, e)| rat_at(e, &format!("{path}[{i}]")))
        .collect()
}

fn rat_matrix(v: &Value, path: &str) -> CliResult<RatMatrix> {
    let arr = v
        .as_array()
        .ok_or_else(|| format!("expected an array of rows at {path}"))?;
    let mut rows = Vec::with_capacity(arr.len());
    for (i, row) in arr.iter().enumerate() {
        rows.push(rat_vec(row, &format!("{path}[{i}]"))?);
    }
    RatMatrix::from_rows(rows).map_err(|e| format!("bad matrix at {path}: {e}"))
}

/// {"A": [[...]], "b": [...], "nonneg": bool}
pub fn parse_hrep(v: &Value) -> CliResult<HPolytope> {
    let a = rat_matrix(field(v, "A", "$")?, "$.A")?;
    let b = rat_vec(field(v, "b", "$")?, "$.b")?;
    let nonneg = field(v, "nonneg", "$")?
        .as_bool()
        .ok_or("expected a boolean at $.nonneg")?;
    HPolytope::new(a, b, nonneg).map_err(|e| format!("invalid polytope: {e}"))
}

/// {"M": [[...]], "x": [...]}; the point is optional for callers that
/// supply it on the command line instead.
pub fn parse_direction_system(v: &Value) -> CliResult<(DirectionMatrix, Option<Vec<Rat>>)> {
    let m = rat_matrix(field(v, "M", "$")?, "$.M")?;
    let dm = DirectionMatrix::new(m).map_err(|e| format!("invalid direction matrix: {e}"))?;
    let x = match v.as_object().and_then(|o| o.get("x")) {
        Some(xv) => Some(rat_vec(xv, "$.x")?),
        None => None,
    };
    Ok((dm, x))
}

/// {"a": [...]}
pub fn parse_weights(v: &Value) -> CliResult<Vec<Rat>> {
    rat_vec(field(v, "a", "$")?, "$.a")
}

/// {"exponents": [...]}
pub fn parse_monomial(v: &Value) -> CliResult<ExponentVector> {
    exponents_at(field(v, "exponents", "$")?, "$.exponents")
}

fn exponents_at(v: &Value, path: &str) -> CliResult<ExponentVector> {
    let arr = v
        .as_array()
        .ok_or_else(|| format!("expected an array at {path}"))?;
    let mut k = Vec::with_capacity(arr.len());
    for (i, e) in arr.iter().enumerate() {
        let n = e
            .as_u64()
            .and_then(|n| u32::try_from(n).ok())
            .ok_or_else(|| format!("expected a small nonnegative integer at {path}[{i}]"))?;
        k.push(n);
    }
    Ok(ExponentVector::new(k))
}

/// Root array of {"coeff": "p/q", "exponents": [...]}.
pub fn parse_polynomial(v: &Value, nvars: usize) -> CliResult<Polynomial> {
    let arr = v
        .as_array()
        .ok_or("expected an array of terms at $")?;
    let mut terms = Vec::with_capacity(arr.len());
    for (i, t) in arr.iter().enumerate() {
        let path = format!("$[{i}]");
        let coeff = rat_at(field(t, "coeff", &path)?, &format!("{path}.coeff"))?;
        let k = exponents_at(field(t, "exponents", &path)?, &format!("{path}.exponents"))?;
        terms.push((coeff, k));
    }
    Polynomial::new(nvars, terms).map_err(|e| format!("invalid polynomial: {e}"))
}

/// Inline list of rationals, separated by commas or whitespace.
pub fn parse_inline_rats(s: &str, what: &str) -> CliResult<Vec<Rat>> {
    let parts: Vec<&str> = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
        .collect();
    if parts.is_empty() {
        return Err(format!("{what} is empty"));
    }
    parts
        .iter()
        .map(|p| parse_rat(p).map_err(|e| format!("bad {what} entry {p:?}: {e}")))
        .collect()
}

/// Inline matrix: rows separated by ';', entries by commas or whitespace.
pub fn parse_inline_matrix(s: &str, what: &str) -> CliResult<RatMatrix> {
    let mut rows = Vec::new();
    for row in s.split(';') {
        rows.push(parse_inline_rats(row, what)?);
    }
    RatMatrix::from_rows(rows).map_err(|e| format!("bad {what}: {e}"))
}

pub fn parse_inline_exponents(s: &str) -> CliResult<ExponentVector> {
    let parts: Vec<&str> = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
        .collect();
    let mut k = Vec::with_capacity(parts.len());
    for p in &parts {
        k.push(
            p.parse::<u32>()
                .map_err(|_| format!("bad exponent {p:?}: expected a nonnegative integer"))?,
        );
    }
    if k.is_empty() {
        return Err("exponent list is empty".into());
    }
    Ok(ExponentVector::new(k))
}

fn matrix_json(m: &RatMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(|e| json!(format_rat(e))).collect()))
            .collect(),
    )
}

fn vec_json(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(|e| json!(format_rat(e))).collect())
}

/// Canonical form: sorted keys, two-space pretty printing, trailing newline,
/// all rationals as strings. serialize(parse(file)) is the identity on files
/// in this form.
fn canonical(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn serialize_hrep(h: &HPolytope) -> String {
    canonical(&json!({
        "A": matrix_json(h.a()),
        "b": vec_json(h.b()),
        "nonneg": h.nonneg(),
    }))
}

pub fn serialize_direction_system(m: &DirectionMatrix, x: Option<&[Rat]>) -> String {
    let mut doc = serde_json::Map::new();
    doc.insert("M".to_string(), matrix_json(m.matrix()));
    if let Some(x) = x {
        doc.insert("x".to_string(), vec_json(x));
    }
    canonical(&Value::Object(doc))
}

pub fn serialize_weights(a: &[Rat]) -> String {
    canonical(&json!({ "a": vec_json(a) }))
}
