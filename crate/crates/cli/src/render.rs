//! Text and JSON rendering of series, volumes and reports.
//!
//! JSON schema for a series: `{"numerator": [[lExp, tExp, coeff], ...],
//! "denominator": [[a, b, multiplicity], ...]}` with coefficients as decimal
//! strings and the factor `[a, b, m]` meaning `(1 - L^a T^b)^m`. Volumes are
//! analogous with one-variable terms and factors `(1 - L^-c)^m`.

use serde_json::{json, Value};

use qoseries::{BivRat, LPoly, LVolRat};

pub fn bivrat_to_json(x: &BivRat) -> Value {
    let numerator: Vec<Value> = x
        .num()
        .coeffs()
        .flat_map(|(t, c)| {
            c.terms()
                .map(|(l, coeff)| json!([l, t, coeff.to_string()]))
                .collect::<Vec<_>>()
        })
        .collect();
    let mut factors: Vec<(&(i64, usize), &usize)> = x.den().iter().collect();
    factors.sort_by_key(|(&(a, b), _)| (b, a));
    let denominator: Vec<Value> = factors
        .into_iter()
        .map(|(&(a, b), &m)| json!([a, b, m]))
        .collect();
    json!({ "numerator": numerator, "denominator": denominator })
}

pub fn lpoly_to_json(p: &LPoly) -> Value {
    let terms: Vec<Value> = p.terms().map(|(e, c)| json!([e, c.to_string()])).collect();
    json!(terms)
}

pub fn volume_to_json(v: &LVolRat) -> Value {
    let numerator: Vec<Value> = v
        .num()
        .terms()
        .map(|(e, c)| json!([e, c.to_string()]))
        .collect();
    let denominator: Vec<Value> = v.den().iter().map(|(&c, &m)| json!([c, m])).collect();
    json!({ "numerator": numerator, "denominator": denominator })
}

/// One coefficient table row per T-power.
pub fn expansion_to_json(coeffs: &[LPoly]) -> Value {
    let rows: Vec<Value> = coeffs
        .iter()
        .enumerate()
        .map(|(s, c)| json!([s, c.to_string()]))
        .collect();
    json!(rows)
}

pub fn expansion_to_text(coeffs: &[LPoly]) -> String {
    let mut out = String::new();
    for (s, c) in coeffs.iter().enumerate() {
        out.push_str(&format!("  T^{s}: {c}\n"));
    }
    out
}
