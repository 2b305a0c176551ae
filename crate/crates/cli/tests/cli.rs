//! End-to-end runs of the `ellface` binary.

use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn ellface(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ellface")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn rows(doc: &Value) -> &Vec<Value> {
    doc["rows"].as_array().unwrap()
}

#[test]
fn a1_table_has_six_entries_per_u() {
    let doc = json_of(&ellface(&["weights", "--family", "A", "--rank", "1", "--u", "0.2,0.4"]));
    assert_eq!(rows(&doc).len(), 12);
    assert_eq!(doc["meta"]["entries_per_u"], 6);
    for r in rows(&doc) {
        assert!(r["pattern"].as_str().unwrap().starts_with("I-"));
    }
}

#[test]
fn b2_table_has_part_two_patterns() {
    let doc = json_of(&ellface(&["weights", "--family", "B", "--rank", "2", "--u", "0.3"]));
    let patterns: Vec<&str> = rows(&doc).iter().map(|r| r["pattern"].as_str().unwrap()).collect();
    assert!(patterns.contains(&"II-diag"));
    assert!(patterns.contains(&"II-off"));
}

#[test]
fn csv_matches_json() {
    let args = ["weights", "--family", "C", "--rank", "2", "--u", "0.1:0.5:3"];
    let doc = json_of(&ellface(&args));
    let out = ellface(&[&args[..], &["--format", "csv"]].concat());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let (first, body) = text.split_once('\n').unwrap();
    let meta: Value = serde_json::from_str(first.strip_prefix("# meta ").unwrap()).unwrap();
    assert_eq!(meta, doc["meta"]);
    let mut rd = csv::Reader::from_reader(body.as_bytes());
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        ["u_re", "u_im", "pattern", "nu", "mu", "lam", "wbar_re", "wbar_im", "kappa_re", "kappa_im", "w_re", "w_im"]
    );
    let records: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), rows(&doc).len());
    for (rec, row) in records.iter().zip(rows(&doc)) {
        assert_eq!(&rec[2], row["pattern"].as_str().unwrap());
        let w_re: f64 = rec[10].parse().unwrap();
        assert_eq!(w_re, row["w"][0].as_f64().unwrap());
    }
}

#[test]
fn json_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.json");
    let out = ellface(&["verify", "--family", "A", "--rank", "1", "--suite", "face-ybe,kappa", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = fs::read_to_string(&path).unwrap();
    let doc: Value = serde_json::from_str(&text).unwrap();
    let mut again = serde_json::to_string_pretty(&doc).unwrap();
    again.push('\n');
    assert_eq!(again, text);
    assert_eq!(doc["meta"]["pass"], true);
}

#[test]
fn empty_suite_is_a_usage_error() {
    let out = ellface(&["verify", "--suite", ","]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "usage");
}

#[test]
fn unknown_family_is_rejected() {
    let out = ellface(&["weights", "--family", "E"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tolerance_controls_exit_status() {
    let out = ellface(&["verify", "--suite", "unitarity", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["meta"]["pass"], false);
}

#[test]
fn gauge_on_d3_reports_both_stages() {
    let doc = json_of(&ellface(&["verify", "--family", "D", "--rank", "3", "--suite", "gauge"]));
    let stages: Vec<&str> = rows(&doc).iter().map(|r| r["meta"]["stage"].as_str().unwrap()).collect();
    assert_eq!(stages, ["1-cross-ratio", "1-double-ratio", "2-fit"]);
    for r in rows(&doc) {
        assert_eq!(r["status"], "pass");
    }
}

#[test]
fn crossing_on_a2_is_skipped() {
    let doc = json_of(&ellface(&["verify", "--family", "A", "--rank", "2", "--suite", "crossing", "--u", "0.3"]));
    assert_eq!(rows(&doc)[0]["status"], "skipped");
}

#[test]
fn twistor_a1_dump() {
    let doc = json_of(&ellface(&["twistor", "--family", "A", "--rank", "1", "--z", "0.3,0.6"]));
    assert_eq!(rows(&doc).len(), 2 * 16);
    for r in rows(&doc) {
        assert!(r["disagreement"].as_f64().unwrap() < 1e-8);
        // F commutes with the weight: entries vanish unless {i, k} = {j, l}.
        let (row, col) = (r["row"].as_array().unwrap(), r["col"].as_array().unwrap());
        let same = (row[0] == col[0] && row[1] == col[1]) || (row[0] == col[1] && row[1] == col[0]);
        if !same {
            assert_eq!(r["product"], serde_json::json!([0.0, 0.0]));
            assert_eq!(r["closed"], serde_json::json!([0.0, 0.0]));
        }
    }
}

#[test]
fn config_file_is_honoured_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# B2 table\nfamily = B\nrank = 2\nu = 0.25\nformat = csv\n").unwrap();
    let out = ellface(&["weights", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    let doc = json_of(&out);
    assert_eq!(doc["meta"]["family"], "B");
    assert_eq!(doc["meta"]["u"], serde_json::json!([0.25]));
}
