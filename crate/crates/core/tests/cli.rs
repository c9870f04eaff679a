use std::path::PathBuf;
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_posilab"))
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn check_accepts_and_rejects_shift() {
    let shift = fixture("shift3.json");
    let out = run(&["check", &shift, "--k", "3", "--n", "2", "--lambda", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["holds"], true);

    let out = run(&["check", &shift, "--k", "0", "--n", "2", "--lambda", "1000"]);
    assert_eq!(out.status.code(), Some(0), "a failed verdict is still a clean run");
    let v = json(&out);
    assert_eq!(v["report"]["holds"], false);
    assert_eq!(v["report"]["witness"][0][0].as_f64().unwrap().abs(), 1.0);
}

#[test]
fn lambda_min_reports() {
    let out = run(&["lambda-min", &fixture("identity3.json"), "--k", "0", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json(&out)["result"]["lambda_min"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let v = json(&run(&["lambda-min", &fixture("shift3.json"), "--k", "0", "--n", "2"]));
    assert_eq!(v["result"]["feasible"], false);
    assert!(v["result"]["kernel_obstruction"].is_array());

    let v = json(&run(&["lambda-min", &fixture("restriction_example.json"), "--k", "1", "--n", "2"]));
    let l = v["result"]["lambda_min"].as_f64().unwrap();
    assert!((l - 3.178_698_154_864_173_7).abs() < 1e-9);
    assert_eq!(v["certificate"]["upper_holds"], true);
    assert_eq!(v["certificate"]["lower_fails"], true);
}

#[test]
fn decompose_and_tensor() {
    let v = json(&run(&["decompose", &fixture("decomposition_example.json"), "--k", "1", "--n", "2"]));
    assert_eq!(v["check"]["range_dim"], 3);
    assert_eq!(v["check"]["kernel_dim"], 1);
    assert_eq!(v["check"]["passed"], true);

    let shift = fixture("shift3.json");
    let v = json(&run(&["tensor", &shift, &shift, "--k", "3", "--n", "2", "--lambda", "1", "--mu", "1"]));
    assert_eq!(v["report"]["holds"], true);
}

#[test]
fn condexp_dispatch() {
    let space = fixture("interval8.json");
    for check in ["norm", "lemma31", "polar"] {
        let out = run(&["condexp", &space, check]);
        assert_eq!(out.status.code(), Some(0), "{check}");
        assert_eq!(json(&out)["holds"], true, "{check}");
    }
    let v = json(&run(&["condexp", &space, "thm35", "--k", "1", "--n", "2", "--lambda", "4"]));
    assert_eq!(v["matrix_holds"], true);
    assert_eq!(run(&["condexp", &space, "thm33"]).status.code(), Some(1));
}

#[test]
fn invalid_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dim_rows": 2, "dim_cols": 2, "entries": [[[1, 0], [0, 0]]]}"#).unwrap();
    let out = run(&["check", bad.to_str().unwrap(), "--k", "0", "--n", "1", "--lambda", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("entries"));

    let shift = fixture("shift3.json");
    assert_eq!(run(&["check", &shift, "--k", "0", "--n", "0", "--lambda", "1"]).status.code(), Some(1));
    assert_eq!(run(&["check", &shift, "--k", "0", "--n", "1", "--lambda", "-1"]).status.code(), Some(1));
    assert_eq!(run(&["check", &shift, "--k", "0"]).status.code(), Some(1));
    assert_eq!(run(&["lambda-min", "/no/such/file.json", "--k", "0", "--n", "1"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let space = dir.path().join("space.json");
    std::fs::write(&space, r#"{"atoms": [{"mass": -1, "label": "a"}], "partition": [[0]], "w": [[1, 0]], "u": [[1, 0]]}"#).unwrap();
    assert_eq!(run(&["condexp", space.to_str().unwrap(), "norm"]).status.code(), Some(1));
}

#[test]
fn tensor_precondition_is_invalid_input() {
    let shift = fixture("shift3.json");
    let out = run(&["tensor", &shift, &shift, "--k", "0", "--n", "2", "--lambda", "1", "--mu", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn paper_verify_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&["paper-verify", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let status = |id: &str| {
        v["claims"]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["claim_id"] == id)
            .map(|c| c["status"].as_str().unwrap().to_string())
    };
    assert_eq!(status("ex2.2-membership").as_deref(), Some("match"));
    assert_eq!(status("ex-thm2.10-lambda3").as_deref(), Some("mismatch"));
    assert_eq!(status("ex3.6-Euw").as_deref(), Some("mismatch"));

    let out = run(&["paper-verify", "--out", dir.path().join("missing/report.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

fn malformed_document() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-z{}\\[\\],: 0-9\"]{0,40}",
        (0usize..4, 0usize..4, 0usize..4).prop_map(|(r, c, given)| {
            let row = vec!["[1, 0]"; c].join(", ");
            let rows = vec![format!("[{row}]"); given].join(", ");
            format!(r#"{{"dim_rows": {r}, "dim_cols": {c}, "entries": [{rows}]}}"#)
        }),
        Just(r#"{"dim_rows": 1, "dim_cols": 1, "entries": [[[1, 0]]], "extra": 1}"#.to_string()),
        Just(r#"{"dim_rows": 1, "dim_cols": 1, "entries": [[[1]]]}"#.to_string()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn malformed_matrix_files_exit_one_or_parse(text in malformed_document()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        std::fs::write(&path, &text).unwrap();
        let out = run(&["check", path.to_str().unwrap(), "--k", "0", "--n", "1", "--lambda", "1"]);
        let code = out.status.code();
        if posilab::io::parse_matrix(&text).is_ok_and(|m| m.is_square()) {
            prop_assert_eq!(code, Some(0));
        } else {
            prop_assert_eq!(code, Some(1));
        }
    }
}
