use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value as Json;

fn p3109(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_p3109"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<Json> {
    stdout(o).lines().map(|l| serde_json::from_str(l).expect("valid JSON line")).collect()
}

#[test]
fn inspect_3p1ue() {
    let o = p3109(&["inspect", "3p1ue"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let last: Vec<&str> = text.lines().map(|l| l.split_whitespace().last().unwrap()).collect();
    assert_eq!(last, ["0", "0.125", "0.25", "0.5", "1", "2", "Inf(+)", "NaN"]);
}

#[test]
fn inspect_rows_match_width() {
    for (fmt, k) in [("4p2se", 4), ("6p1uf", 6), ("8p4se", 8)] {
        let o = p3109(&["inspect", fmt]);
        assert_eq!(stdout(&o).lines().count(), 1 << k, "{fmt}");
        let rows = json_lines(&p3109(&["inspect", fmt, "--json"]));
        assert_eq!(rows.len(), 1 << k);
        assert_eq!(rows[0]["class"], "zero");
    }
}

#[test]
fn project_overflow_saturates() {
    let o = p3109(&["project", "8p4se", "448", "--rnd", "rne", "--sat", "satfin"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("encoding 126"), "{text}");
    assert!(text.contains("value 224"), "{text}");

    let row = &json_lines(&p3109(&["project", "8p4se", "-5*2^-12", "--rnd", "ru", "--json"]))[0];
    assert_eq!(row["value"], "-0.0009765625");
}

#[test]
fn stochastic_projection_is_seeded() {
    let run = |seed: &str| stdout(&p3109(&["project", "8p4se", "1.0625", "--rnd", "sr:8", "--seed", seed]));
    assert_eq!(run("7"), run("7"));
    let values: std::collections::BTreeSet<String> = (0..16).map(|s| run(&s.to_string())).collect();
    assert_eq!(values.len(), 2, "1.0625 lies between 1 and 1.125");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["project", "8p4se", "1e3"],
        vec!["project", "8p4se", "0.1"],
        vec!["project", "8p4se", "1", "--bogus"],
        vec!["project", "9p9se", "1"],
        vec!["verify", "--suite", "no-such-suite"],
        vec!["fts", "4p2se", "0.3", "1"],
        vec!["fts", "4p2se", "1", "1", "--spec", "rne:satfin", "--spec", "ru:satfin"],
    ] {
        let o = p3109(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn fts_trace() {
    let o = p3109(&["fts", "8p4se", "3", "-0.0625", "--spec", "rne:satfin"]);
    assert!(o.status.success());
    let tr: Json = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(tr["exact_sum"], "2.9375");
    assert_eq!(tr["delta"], "-0.0625");
    assert_eq!(tr["t"], serde_json::json!({ "class": "finite", "m": "-8", "e": -7 }));
}

#[test]
fn extract_p1_witness() {
    let o = p3109(&["extract", "4p1se", "2", "1"]);
    assert!(o.status.success());
    let tr: Json = serde_json::from_slice(&o.stdout).unwrap();
    // x_h = 2 exceeds 2^-1 * sigma = 1
    assert_eq!(tr["x_h"], serde_json::json!({ "class": "finite", "m": "1", "e": 1 }));
    assert_eq!(tr["j"], serde_json::json!({ "max": 1 }));
}

#[test]
fn verify_json_is_deterministic() {
    let args = [
        "verify",
        "--suite",
        "triangle-isomorphism",
        "--suite",
        "reduction",
        "--kmax",
        "5",
        "--seed",
        "11",
        "--json",
        "--no-timing",
    ];
    let (a, b) = (p3109(&args), p3109(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    for r in json_lines(&a) {
        assert_eq!(r["failures"], serde_json::json!([]));
        assert!(r["cases"].as_u64().unwrap() > 0);
    }
}

#[test]
fn verify_all_small() {
    let o = p3109(&["verify", "--suite", "all", "--kmax", "5"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn mutations_fail_verification() {
    for m in ["nan-slot", "inf-slot", "bias"] {
        let o = p3109(&["verify", "--mutate", m, "--kmax", "5"]);
        assert_eq!(o.status.code(), Some(1), "{m}");
        assert!(stdout(&o).contains("FAIL"));
    }
}

#[test]
fn diff_against_reference() {
    assert!(p3109(&["diff", "--kmax", "6"]).status.success());
    let o = p3109(&["diff", "6p3ue", "--mutate", "bias"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("mismatches"));
}

#[test]
fn export_tables() {
    let dir: PathBuf = std::env::temp_dir().join(format!("p3109-export-{}", std::process::id()));
    let d = dir.to_str().unwrap();
    assert!(p3109(&["export", "--kmax", "4", "--dir", d]).status.success());
    assert!(p3109(&["export", "5p2sf", "--dir", d, "--jsonl"]).status.success());
    let csv = std::fs::read_to_string(dir.join("3p1ue.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "encoding,binary,class,m,e,value");
    assert_eq!(lines.len(), 9);
    assert_eq!(lines[7], "6,110,inf,,,+Inf");
    let csvs = std::fs::read_dir(&dir).unwrap().filter(|e| e.as_ref().unwrap().path().extension().unwrap() == "csv");
    assert_eq!(csvs.count(), 10 + 14);
    assert_eq!(std::fs::read_to_string(dir.join("5p2sf.jsonl")).unwrap().lines().count(), 32);
    std::fs::remove_dir_all(&dir).unwrap();
}
