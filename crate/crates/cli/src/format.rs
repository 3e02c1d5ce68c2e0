//! Number formatting and output documents.

use serde::Serialize;
use serde_json::{json, Number, Value};
use stadion::pantograph::StabilityClass;
use stadion::normalform::Verdict;
use stadion::ToleranceSet;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const SIGNIFICANT: usize = 9;

/// `x` rounded to nine significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT - 1, x).parse().unwrap_or(x)
}

/// Shortest decimal text of `x` rounded to nine significant digits;
/// exponent notation outside `[1e-5, 1e16)`.
pub fn sig(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        return "0".into();
    }
    if !r.is_finite() {
        return r.to_string();
    }
    let e = r.abs().log10().floor();
    if (-5.0..16.0).contains(&e) {
        r.to_string()
    } else {
        format!("{r:e}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(sig).unwrap_or_default()
}

pub fn class_label(class: StabilityClass) -> String {
    match class {
        StabilityClass::Elliptic => "elliptic".into(),
        StabilityClass::Hyperbolic => "hyperbolic".into(),
        StabilityClass::Parabolic => "parabolic".into(),
        StabilityClass::Resonant { k, j } => format!("resonant-{j}/{k}"),
    }
}

pub fn verdict_label(verdict: Verdict) -> String {
    match verdict {
        Verdict::IslandCertified { m } => format!("island-certified-{m}"),
        Verdict::Inconclusive => "inconclusive".into(),
        Verdict::ResonantSkip { k, j } => format!("resonant-skip-{j}/{k}"),
    }
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(x) if x.is_f64() => {
            if let Some(r) = x.as_f64().map(round_sig).and_then(Number::from_f64) {
                *x = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// JSON report with the schema version and the tolerances in force.
pub fn report<T: Serialize>(command: &str, tol: &ToleranceSet, result: &T) -> Result<Vec<u8>, CliError> {
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "tolerances": tol,
        "result": result,
    });
    round_floats(&mut doc);
    let mut out = serde_json::to_vec_pretty(&doc)?;
    out.push(b'\n');
    Ok(out)
}

/// CSV table with a fixed header.
pub fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}
