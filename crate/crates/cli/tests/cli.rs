use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_simplexk"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn simplexk")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn ktheory_text_prints_four_lines() {
    let o = run(&["ktheory", "[3,4,4]", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5, "{text}");
    assert!(lines[1].starts_with("  Wh(Γ)") && lines[1].ends_with("≅ ⊕_∞ Z/2"));
    assert!(lines[2].ends_with("≅ Z/4 ⊕ Z/4 ⊕ ⊕_∞ Z/2"));
    assert!(lines[3].ends_with("≅ Z^2"));
    assert!(lines[4].contains("n ≤ -2") && lines[4].ends_with("≅ 0"));
}

#[test]
fn ktheory_text_claims_are_in_the_json() {
    let text = stdout(&run(&["ktheory", "[3,4,4]", "--format", "text"]));
    let report = json(&run(&["ktheory", "[3,4,4]"]));
    let texts: Vec<&str> = report["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["text"].as_str().unwrap())
        .collect();
    for line in text.lines().skip(1) {
        let claim = line.rsplit("≅ ").next().unwrap();
        assert!(texts.contains(&claim), "{claim} not in report");
    }
    assert!(!report["provenance"].as_array().unwrap().is_empty());
}

#[test]
fn explicit_kb_path_matches_bundled() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/kb_gamma3.json");
    let a = run(&["ktheory", "[3,4,4]", "--kb", path]);
    let b = run(&["ktheory", "[3,4,4]"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_diagram_is_accepted() {
    let m = r#"{"rank":4,"m":[[1,3,2,2],[3,1,4,2],[2,4,1,4],[2,2,4,1]]}"#;
    assert_eq!(run(&["ktheory", m]).stdout, run(&["ktheory", "[3,4,4]"]).stdout);
}

#[test]
fn geodesics_table_has_six_rows_two_infinite() {
    let o = run(&["geodesics", "[3,4,4]", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows.iter().filter(|r| r.contains("periodic")).count(), 2);

    let j = json(&run(&["geodesics", "[3,4,4]"]));
    let names: Vec<_> = j["edges"]
        .as_array()
        .unwrap()
        .iter()
        .filter_map(|e| e["stabilizer"]["name"].as_str())
        .collect();
    assert_eq!(names, ["D3xDinf", "D2xDinf"]);
}

#[test]
fn analyze_reports_inventories() {
    let j = json(&run(&["analyze", "[3,4,4]"]));
    assert_eq!(j["truncated_domain"]["counts"], serde_json::json!([6, 9, 5, 1]));
    assert_eq!(j["model"]["counts"].as_array().unwrap().len(), 9);
    assert_eq!(j["parabolics"].as_array().unwrap().len(), 15);
}

#[test]
fn snf_from_stdin() {
    let mut child = bin()
        .args(["snf", "-", "--format", "text"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"2 3\n2 4 4\n-6 6 12\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "diagonal: [2, 6]\nrank: 2\ncokernel: Z/2 ⊕ Z/6\n");
}

#[test]
fn snf_json_reconstructs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    std::fs::write(&path, "3 3\n1 2 3\n4 5 6\n7 8 9\n").unwrap();
    let j = json(&run(&["snf", path.to_str().unwrap()]));
    assert_eq!(j["diagonal"], serde_json::json!(["1", "3", "0"]));
    assert_eq!(j["cokernel"], "Z ⊕ Z/3");
}

#[test]
fn snf_missing_file_is_usage_error() {
    let o = run(&["snf", "definitely/not/here.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn snf_malformed_matrix_is_domain_error() {
    let mut child = bin()
        .args(["snf", "-"])
        .stdin(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"2 2\n1 x 3 4\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["module"], "intlinalg");
    assert!(err["error"]["message"].as_str().unwrap().contains("row 1, col 2"));
}

#[test]
fn unknown_subcommand_and_bad_format_exit_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["ktheory", "[3,4,4]", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(run(&["ktheory"]).status.code(), Some(2));
    assert_eq!(run(&["ktheory", "[3,4,4]", "--kb", "missing.json"]).status.code(), Some(2));
}

#[test]
fn unsupported_diagram_fails_with_module_message() {
    let o = run(&["ktheory", "[3,3,6]"]);
    assert_eq!(o.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(err["error"]["module"].is_string());
    assert!(!err["error"]["message"].as_str().unwrap().is_empty());
}

#[test]
fn malformed_diagram_is_domain_error() {
    let o = run(&["geodesics", "[3,x,4]"]);
    assert_eq!(o.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["module"], "coxeter");
}

#[test]
fn validate_kb_passes_bundled_and_rejects_broken() {
    let o = run(&["validate-kb"]);
    assert_eq!(o.status.code(), Some(0));
    let j = json(&o);
    assert_eq!(j["entries"], 60);
    assert!(j["adapted_family"]["conditions"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("kb.json");
    std::fs::write(&path, r#"{"version": 1, "entries": []"#).unwrap();
    let o = run(&["validate-kb", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["module"], "kb");
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = run(&["ktheory", "[3,4,4]", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), run(&["ktheory", "[3,4,4]"]).stdout);
}
