//! JSON, CSV and plain-text renderings. JSON objects have sorted keys and
//! every number goes through [`number`], so CSV and JSON print identical
//! digits for the same value.

use serde_json::{json, Map, Value};
use weakcat_core::scenarios::{AuditRecord, ScenarioReport};
use weakcat_core::vonneumann::{CouplingResult, WeakLimitRow};
use weakcat_core::Complex64;

pub const SCHEMA: &str = "weakcat/1";

/// `-0.0` becomes `0.0`; non-finite values become `null`.
pub fn number(x: f64) -> Value {
    let x = if x == 0.0 { 0.0 } else { x };
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn complex(z: Complex64) -> Value {
    json!({ "re": number(z.re), "im": number(z.im) })
}

fn opt_complex(z: Option<Complex64>) -> Value {
    z.map(complex).unwrap_or(Value::Null)
}

/// Text of a number as it appears in JSON output; empty for `None`.
pub fn csv_number(x: Option<f64>) -> String {
    match x.map(number) {
        Some(Value::Number(n)) => n.to_string(),
        _ => String::new(),
    }
}

pub fn audit_json(audit: &AuditRecord) -> Value {
    Value::Array(
        audit
            .findings
            .iter()
            .map(|f| {
                json!({
                    "check": f.check,
                    "passed": f.passed,
                    "value": f.value.map(number).unwrap_or(Value::Null),
                    "detail": f.detail,
                })
            })
            .collect(),
    )
}

pub fn scenario_json(r: &ScenarioReport) -> Value {
    let observables: Vec<Value> = r
        .observables
        .iter()
        .map(|o| {
            json!({
                "name": o.name,
                "weak_value": opt_complex(o.weak_value),
                "reversed": opt_complex(o.reversed),
                "claimed": opt_complex(o.claimed.as_ref().map(|c| c.value)),
                "claim_ref": o.claimed.as_ref().map(|c| Value::String(c.reference.clone())).unwrap_or(Value::Null),
                "deviation": o.deviation.map(number).unwrap_or(Value::Null),
            })
        })
        .collect();
    json!({
        "schema": SCHEMA,
        "scenario": r.scenario,
        "interpretation": r.interpretation.name(),
        "feasible": r.feasible,
        "postselect_prob": number(r.postselect_prob),
        "helicity_verdict": r.helicity.map(|h| Value::String(h.name().into())).unwrap_or(Value::Null),
        "observables": observables,
        "audit": audit_json(&r.audit),
    })
}

pub fn scenario_csv(r: &ScenarioReport) -> String {
    let mut out = String::from("observable,re,im,claimed_re,claimed_im,deviation\n");
    for o in &r.observables {
        let claimed = o.claimed.as_ref().map(|c| c.value);
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            o.name,
            csv_number(o.weak_value.map(|w| w.re)),
            csv_number(o.weak_value.map(|w| w.im)),
            csv_number(claimed.map(|c| c.re)),
            csv_number(claimed.map(|c| c.im)),
            csv_number(o.deviation),
        ));
    }
    out
}

fn fmt_complex(z: Complex64) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{:.12} {sign} {:.12}i", z.re + 0.0, z.im.abs())
}

pub fn scenario_text(r: &ScenarioReport) -> String {
    let mut out = format!("scenario        {}\ninterpretation  {}\n", r.scenario, r.interpretation);
    if r.feasible {
        out.push_str(&format!("postselection   p = {:.12}\n", r.postselect_prob));
    } else {
        out.push_str("postselection   impossible (pre and post are orthogonal)\n");
    }
    if let Some(h) = r.helicity {
        out.push_str(&format!("helicity        {}\n", h.name()));
    }
    out.push('\n');
    for o in &r.observables {
        let value = o.weak_value.map(fmt_complex).unwrap_or_else(|| "-".into());
        out.push_str(&format!("  {:<8} {value}", o.name));
        if let (Some(c), Some(d)) = (&o.claimed, o.deviation) {
            out.push_str(&format!("   claimed {}  deviation {d:.3e}", fmt_complex(c.value)));
        } else if let Some(c) = &o.claimed {
            out.push_str(&format!("   claimed {}", fmt_complex(c.value)));
        }
        out.push('\n');
    }
    out.push_str("\naudit\n");
    for f in &r.audit.findings {
        out.push_str(&format!("  [{}] {:<20} {}\n", if f.passed { "ok" } else { "FAIL" }, f.check, f.detail));
    }
    out
}

/// Header fields shared by the single-value commands.
pub fn envelope(scenario: &str, interpretation: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), SCHEMA.into());
    m.insert("scenario".into(), scenario.into());
    m.insert("interpretation".into(), interpretation.into());
    m
}

pub fn coupling_json(
    mut m: Map<String, Value>,
    r: &CouplingResult,
    sigma: f64,
    n: usize,
    aw: Complex64,
    var_p: f64,
) -> Value {
    m.insert("g".into(), number(r.g));
    m.insert("sigma".into(), number(sigma));
    m.insert("grid_points".into(), n.into());
    m.insert("weak_value".into(), complex(aw));
    m.insert("mean_position_shift".into(), number(r.mean_position_shift));
    m.insert("mean_momentum_shift".into(), number(r.mean_momentum_shift));
    m.insert("predicted_position_shift".into(), number(r.g * aw.re));
    m.insert("predicted_momentum_shift".into(), number(2.0 * r.g * var_p * aw.im));
    m.insert("momentum_variance".into(), number(var_p));
    m.insert("success_prob".into(), number(r.success_prob));
    m.insert("joint_norm_check".into(), number(r.joint_norm_check));
    Value::Object(m)
}

pub const SWEEP_HEADER: &str =
    "g,position_shift,momentum_shift,predicted_position,predicted_momentum,position_error,momentum_error";

pub fn sweep_csv(rows: &[WeakLimitRow]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for r in rows {
        let fields = [
            r.g,
            r.position_shift,
            r.momentum_shift,
            r.predicted_pos,
            r.predicted_mom,
            r.position_error(),
            r.momentum_error(),
        ];
        let line: Vec<String> = fields.iter().map(|x| csv_number(Some(*x))).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn sweep_json(mut m: Map<String, Value>, rows: &[WeakLimitRow]) -> Value {
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "g": number(r.g),
                "position_shift": number(r.position_shift),
                "momentum_shift": number(r.momentum_shift),
                "predicted_position": number(r.predicted_pos),
                "predicted_momentum": number(r.predicted_mom),
                "position_error": number(r.position_error()),
                "momentum_error": number(r.momentum_error()),
            })
        })
        .collect();
    m.insert("rows".into(), Value::Array(rows));
    Value::Object(m)
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use weakcat_core::scenarios::{builtin, evaluate_scenario, Interpretation};

    #[test]
    fn keys_are_sorted_and_zero_is_unsigned() {
        let v = json!({"b": number(-0.0), "a": 1});
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"a":1,"b":0.0}"#);
        assert_eq!(number(f64::NAN), Value::Null);
    }

    #[test]
    fn csv_and_json_agree() {
        let s = builtin("helicity-sign", Interpretation::Evolved).unwrap();
        let r = evaluate_scenario(&s).unwrap();
        let json = scenario_json(&r);
        let csv = scenario_csv(&r);
        for (row, obs) in csv.lines().skip(1).zip(json["observables"].as_array().unwrap()) {
            let fields: Vec<&str> = row.split(',').collect();
            assert_eq!(fields[0], obs["name"].as_str().unwrap());
            assert_eq!(fields[1], obs["weak_value"]["re"].to_string());
            assert_eq!(fields[2], obs["weak_value"]["im"].to_string());
        }
    }
}
