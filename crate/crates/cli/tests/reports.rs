use loopforms_cli::config::{RunConfig, Suite};
use loopforms_cli::report::{emit_report, CheckRecord, Format, VerificationReport};
use loopforms_cli::{run_suite, CliError};
use serde_json::Value;

fn report(checks: Vec<CheckRecord>) -> VerificationReport {
    VerificationReport { config: RunConfig::default(), seed: 17, checks }
}

/// Replaces every leaf by its json type name; arrays keep the shape of their first entry.
fn shape_of(value: &Value) -> Value {
    match value {
        Value::Null => "null".into(),
        Value::Bool(_) => "bool".into(),
        Value::Number(_) => "number".into(),
        Value::String(_) => "string".into(),
        Value::Array(items) => Value::Array(items.first().map(shape_of).into_iter().collect()),
        Value::Object(fields) => Value::Object(fields.iter().map(|(k, v)| (k.clone(), shape_of(v))).collect()),
    }
}

#[test]
fn empty_report_is_json_with_an_empty_check_list() {
    let json: Value = serde_json::from_str(&emit_report(&report(vec![]), Format::Json).unwrap()).unwrap();
    assert_eq!(json["checks"], Value::Array(vec![]));
    assert_eq!(json["seed"], 17);
    let csv = emit_report(&report(vec![]), Format::Csv).unwrap();
    assert_eq!(csv, "name,anchor,residual,tolerance,pass,millis\n");
}

#[test]
fn single_passing_check_is_two_csv_lines() {
    let csv = emit_report(&report(vec![CheckRecord::new("lie.jacobi", "Jacobi", 1e-16, 1e-13, 3)]), Format::Csv).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines, ["name,anchor,residual,tolerance,pass,millis", "lie.jacobi,Jacobi,1e-16,1e-13,true,3"]);
}

#[test]
fn json_round_trip_preserves_every_field() {
    let original = report(vec![
        CheckRecord::new("a.first", "one, with a comma", 1.25e-9, 1e-8, 12),
        CheckRecord::new("b.second", "two", 0.1 + 0.2, 1e-3, 0),
    ]);
    let text = emit_report(&original, Format::Json).unwrap();
    assert_eq!(VerificationReport::from_json(&text).unwrap(), original);
}

#[test]
fn nan_residual_is_null_and_fails() {
    let check = CheckRecord::new("x.broken", "", f64::NAN, 1.0, 0);
    assert!(!check.pass);
    let text = emit_report(&report(vec![check]), Format::Json).unwrap();
    let json: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["checks"][0]["residual"], Value::Null);
    let back = VerificationReport::from_json(&text).unwrap();
    assert!(back.checks[0].residual.is_nan() && !back.checks[0].pass);
    let csv = emit_report(&back, Format::Csv).unwrap();
    assert_eq!(csv.lines().nth(1), Some("x.broken,,,1e0,false,0"));
}

#[test]
fn pass_flag_is_residual_within_tolerance() {
    assert!(CheckRecord::new("x", "", 1e-6, 1e-6, 0).pass);
    assert!(!CheckRecord::new("x", "", 1.0000001e-6, 1e-6, 0).pass);
    assert!(CheckRecord::new("x", "", 0.0, 0.0, 0).pass);
}

#[test]
fn formats_parse_by_name() {
    assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
    assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
    assert_eq!("text".parse::<Format>().unwrap(), Format::Text);
    assert!(matches!("yaml".parse::<Format>(), Err(CliError::UnknownFormat(f)) if f == "yaml"));
}

#[test]
fn text_table_marks_each_check() {
    let r = report(vec![CheckRecord::new("a.ok", "", 1e-9, 1e-6, 1), CheckRecord::new("b.bad", "", 1.0, 1e-6, 2)]);
    let text = emit_report(&r, Format::Text).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[2].starts_with("PASS  a.ok"));
    assert!(lines[3].starts_with("FAIL  b.bad"));
    // columns line up
    assert_eq!(lines[2].find("1.000e-9"), lines[3].find("1.000e0"));
    assert_eq!(lines.last(), Some(&"2 checks, 1 failed"));
}

#[test]
fn json_schema_matches_the_golden_file() {
    let config = RunConfig { suite: Suite::Lie, ..RunConfig::default() };
    let text = emit_report(&run_suite(&config).unwrap(), Format::Json).unwrap();
    let golden: Value = serde_json::from_str(include_str!("golden/report_schema.json")).unwrap();
    assert_eq!(shape_of(&serde_json::from_str(&text).unwrap()), golden);
    // top-level field order is part of the contract too
    let (c, s, k) = (text.find("\"config\"").unwrap(), text.find("\n  \"seed\"").unwrap(), text.find("\"checks\"").unwrap());
    assert!(c < s && s < k);
}
