use std::process::{Command, Output};

use serde_json::Value;

fn fieldred(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fieldred"))
        .args(args)
        .env_remove("FIELDRED_BUDGET")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let out = fieldred(&a);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v)
}

#[test]
fn spread_lists_five_lines() {
    let (code, v) = json(&["spread", "--r", "2", "--t", "2", "--q", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["count"], 5);
    assert_eq!(v["elements"].as_array().unwrap().len(), 5);
    assert_eq!(v["checks"]["normal"], true);
    let (code, v) = json(&["spread", "--r", "2", "--t", "2", "--q", "2", "--conjugate"]);
    assert_eq!(code, 0);
    assert_eq!(v["count"], 5);
}

#[test]
fn verify_lemma_suite_passes() {
    let (code, v) = json(&["verify", "--suite", "lemma-field-reduction"]);
    assert_eq!(code, 0);
    let s = &v["suites"][0];
    assert_eq!(s["status"], "pass");
    assert_eq!(s["criterion"], 1);
    assert!(s.get("wall_time_s").is_none());
    let (_, v) = json(&["verify", "--suite", "segre-variety", "--timing"]);
    assert!(v["suites"][0]["wall_time_s"].is_number());
}

#[test]
fn reports_are_deterministic() {
    let a = fieldred(&["verify", "--suite", "semifields", "--format", "json"]);
    let b = fieldred(&["verify", "--suite", "semifields", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn polar_reduce_agrees() {
    for alpha in ["1", "2", "[0,1]", "[1,1]"] {
        let (code, v) = json(&[
            "polar", "reduce", "--kind", "parabolic", "--q", "3", "--t", "2", "--r", "1", "--alpha", alpha,
            "--gamma", "1",
        ]);
        assert_eq!(code, 0, "{v}");
        assert_eq!(v["checks"]["predicted_matches_computed"], true);
    }
}

#[test]
fn polar_classify_standard() {
    let (code, v) = json(&["polar", "classify", "--q", "3", "--standard", "elliptic", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["type"], "elliptic");
    assert_eq!(v["projective_zeros"], 10);
}

#[test]
fn usage_and_budget_exit_codes() {
    assert_eq!(fieldred(&["bogus"]).status.code(), Some(2));
    assert_eq!(fieldred(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(fieldred(&["field", "--q", "6"]).status.code(), Some(2));
    assert_eq!(
        fieldred(&["spread", "--r", "3", "--t", "2", "--q", "4", "--budget", "100"]).status.code(),
        Some(3)
    );
    let out = Command::new(env!("CARGO_BIN_EXE_fieldred"))
        .args(["spread", "--r", "3", "--t", "2", "--q", "4"])
        .env("FIELDRED_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    // q = 7 of the two-planes suite is gated behind the large budget
    let (code, v) = json(&["verify", "--suite", "two-planes"]);
    assert_eq!(code, 3);
    assert_eq!(v["suites"][0]["status"], "skipped-budget");
}

#[test]
fn field_arithmetic() {
    let (code, v) = json(&["field", "--q", "9", "--op", "mul", "--a", "[0,1]", "--b", "[0,1]"]);
    assert_eq!(code, 0);
    assert_eq!(v["order"], 9);
    assert_eq!(v["subfield_degrees"], serde_json::json!([1, 2]));
    assert!(v["result"].is_string());
    assert_eq!(fieldred(&["field", "--q", "4", "--op", "div", "--a", "1", "--b", "0"]).status.code(), Some(2));
}

#[test]
fn blocking_commands() {
    let (code, v) = json(&["blocking", "--n", "3", "--t", "2", "--q", "3", "--k", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["subspaces_checked"], 91);
    assert_eq!(v["report"]["minimal"], true);
    let (code, _) = json(&["blocking", "--n", "3", "--t", "2", "--q", "4", "--k", "2", "--cone", "baer"]);
    assert_eq!(code, 0);
    assert_eq!(fieldred(&["blocking", "--n", "3", "--t", "2", "--q", "4", "--k", "2", "--cone", "conic"]).status.code(), Some(2));
}

#[test]
fn semifield_file_round_trip_and_failure() {
    let dir = std::env::temp_dir().join(format!("fieldred-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let dump = fieldred(&["semifield", "--field", "4", "--dump"]);
    assert_eq!(dump.status.code(), Some(0));
    let good = dir.join("gf4.txt");
    std::fs::write(&good, &dump.stdout).unwrap();
    let (code, v) = json(&["semifield", "--file", good.to_str().unwrap(), "--spread"]);
    assert_eq!(code, 0);
    assert_eq!(v["spread"]["components"], 5);
    assert_eq!(v["nuclei"]["left"]["order"], 4);

    // break a product: 2 * 3 = 0 is a zero divisor
    let text = String::from_utf8(dump.stdout).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let mut row: Vec<&str> = lines[3].split_whitespace().collect();
    row[3] = "0";
    lines[3] = row.join(" ");
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, lines.join("\n")).unwrap();
    let (code, v) = json(&["semifield", "--file", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["axioms"]["S3"], false);
    assert_eq!(v["zero_divisor"], serde_json::json!([2, 3]));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn linset_commands() {
    let (code, v) = json(&["linset", "analyze", "--r", "2", "--t", "3", "--q", "2", "--vectors", "1,0;0,1;2,4"]);
    assert_eq!(code, 0);
    assert_eq!(v["size"], 7);
    assert_eq!(v["scattered"], true);
    let (code, v) = json(&["linset", "classes", "--t", "3", "--q", "2", "--family", "clubs"]);
    assert_eq!(code, 0);
    assert_eq!(v["class_count"], 1);
}
