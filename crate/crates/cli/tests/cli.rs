use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn pgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pgen"))
        .args(args)
        .output()
        .expect("spawn pgen")
}

fn ok_json(args: &[&str]) -> Value {
    let out = pgen(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_then_zstats_matches_direct_source() {
    let dir = TempDir::new().unwrap();
    for fmt in ["ascii", "packed"] {
        let file = dir.path().join(format!("x.{fmt}"));
        let g = ok_json(&[
            "gen",
            "--seed",
            "7",
            "-n",
            "300",
            "-o",
            p(&file),
            "--out-format",
            fmt,
        ]);
        assert_eq!(g["report"]["length"], 300);
        let src = format!("file:{}", p(&file));
        let from_file = ok_json(&["zstats", "--source", &src, "-k", "6", "--lambda", "3"]);
        let direct = ok_json(&["zstats", "--seed", "7", "-k", "6", "--lambda", "3"]);
        assert_eq!(from_file["report"], direct["report"]);
    }
}

#[test]
fn de_bruijn_file_has_z1_one_under_b() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("db.txt");
    ok_json(&["gen", "--source", "debruijn:8", "-n", "263", "-o", p(&file)]);
    let r = ok_json(&[
        "zstats",
        "--source",
        &format!("file:{}", p(&file)),
        "-k",
        "8",
        "--convention",
        "B",
    ]);
    assert_eq!(r["report"]["z"][1]["num"], 1);
    assert_eq!(r["report"]["z"][1]["den"], 1);
}

#[test]
fn report_schema() {
    let r = ok_json(&["zstats", "-k", "5", "--lambda", "1/2", "--j-max", "4"]);
    let rep = &r["report"];
    for key in [
        "base",
        "k",
        "lambda",
        "convention",
        "window_count",
        "z",
        "pmf",
        "sup_dev",
        "l1_dev",
    ] {
        assert!(rep.get(key).is_some(), "missing {key}");
    }
    assert_eq!(rep["lambda"], "1/2");
    assert_eq!(rep["window_count"], 17);
    assert_eq!(rep["z"].as_array().unwrap().len(), 5);
    let m = &r["manifest"];
    assert_eq!(m["tool"], "pgen");
    assert_eq!(m["job"]["source"]["kind"], "random");
    assert_eq!(m["job"]["convention"], "A");
}

#[test]
fn replay_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cases: Vec<Vec<String>> = vec![
        vec![
            "zstats".into(),
            "-k".into(),
            "7".into(),
            "--seed".into(),
            "3".into(),
        ],
        vec![
            "scan".into(),
            "--k-range".into(),
            "4..6".into(),
            "--lambda".into(),
            "1/2,1".into(),
        ],
        vec![
            "measure".into(),
            "bad".into(),
            "--lambda".into(),
            "1".into(),
            "-k".into(),
            "2".into(),
            "-j".into(),
            "0".into(),
            "--epsilon".into(),
            "1/4".into(),
        ],
        vec![
            "measure".into(),
            "algorithm".into(),
            "--k-ranges".into(),
            "2..2".into(),
            "--steps".into(),
            "4".into(),
        ],
        vec![
            "tv".into(),
            "-k".into(),
            "8".into(),
            "--lambda".into(),
            "3/4".into(),
            "--lambda-prime".into(),
            "1/2".into(),
        ],
    ];
    for (i, args) in cases.iter().enumerate() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = pgen(&args);
        assert!(first.status.success(), "{args:?}");
        let path = dir.path().join(format!("r{i}.json"));
        std::fs::write(&path, &first.stdout).unwrap();
        let again = pgen(&["replay", p(&path)]);
        assert!(again.status.success());
        assert_eq!(first.stdout, again.stdout, "{args:?}");
    }
}

#[test]
fn construct_then_replay_rewrites_same_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("f.txt");
    let args = [
        "construct",
        "--flavor",
        "d2light",
        "--z",
        "even=id,odd=const:4",
        "--k0",
        "2",
        "--steps",
        "1",
        "-o",
        p(&out),
    ];
    let first = pgen(&args);
    assert!(
        first.status.success(),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let digits = std::fs::read(&out).unwrap();
    let report = dir.path().join("c.json");
    std::fs::write(&report, &first.stdout).unwrap();
    std::fs::remove_file(&out).unwrap();
    let again = pgen(&["replay", p(&report)]);
    assert_eq!(first.stdout, again.stdout);
    assert_eq!(digits, std::fs::read(&out).unwrap());
    let v: Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(v["report"]["z_class"]["in_c"], true);
    assert_eq!(v["report"]["z_class"]["in_d"], false);
    assert_eq!(v["report"]["length"], 255);
}

#[test]
fn csv_mirror() {
    let out = pgen(&["zstats", "-k", "4", "--j-max", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "j,z_num,z_den,z,pmf,abs_dev");
    assert_eq!(lines.len(), 5);
}

#[test]
fn scan_random_deviations_shrink() {
    let r = ok_json(&["scan", "--seed", "42", "--k-range", "8..16", "-j", "0,1,2"]);
    let inv = r["report"]["trend"]["1/1"]["inversions"].as_u64().unwrap();
    assert!(inv <= 2, "{inv} inversions");
    let rows = r["report"]["rows"].as_array().unwrap();
    let first = rows[0]["sup_dev"].as_f64().unwrap();
    let last = rows[rows.len() - 1]["sup_dev"].as_f64().unwrap();
    assert!(last < first);
}

#[test]
fn scan_constant_stream_does_not_shrink() {
    let r = ok_json(&["scan", "--source", "constant:0", "--k-range", "4..10"]);
    let rows = r["report"]["rows"].as_array().unwrap();
    let sups: Vec<f64> = rows
        .iter()
        .map(|row| row["sup_dev"].as_f64().unwrap())
        .collect();
    assert!(sups.iter().all(|&s| s > 0.5), "{sups:?}");
}

#[test]
fn scan_empty_range_is_empty() {
    let r = ok_json(&["scan", "--k-range", "9..8"]);
    assert!(r["report"]["rows"].as_array().unwrap().is_empty());
}

#[test]
fn algorithm_trace_is_json_lines() {
    let out = pgen(&["measure", "algorithm", "--steps", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].get("manifest").is_some());
    for (i, rec) in lines[1..].iter().enumerate() {
        assert_eq!(rec["n"], i + 1);
        assert_eq!(rec["chosen_digit"], 0);
        assert_eq!(rec["interval"]["level"], i + 1);
        assert_eq!(rec["measure_num"], 1);
        assert_eq!(rec["measure_den"], 1u64 << (i + 1));
        assert_eq!(rec["threshold_den"], 1u64 << (2 * (i + 1)));
    }
}

#[test]
fn exit_codes() {
    assert_eq!(
        pgen(&["gen", "-n", "5", "-o", "/nonexistent/dir/x.txt"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        pgen(&["zstats", "--source", "file:/nonexistent/x", "-k", "2"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        pgen(&["zstats", "-k", "2", "--base", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        pgen(&["zstats", "--source", "xdebruijn:2", "-k", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        pgen(&["measure", "algorithm", "--schedule", "standard"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(pgen(&["zstats", "-k", "40"]).status.code(), Some(3));
    assert_eq!(pgen(&["measure", "badk", "-k", "5"]).status.code(), Some(3));
}

#[test]
fn measure_reports() {
    let r = ok_json(&["measure", "badk", "-k", "1"]);
    assert_eq!(r["report"]["measure"]["num"], 0);
    assert!(r["report"]["lambdas"].as_array().unwrap().is_empty());
    let r = ok_json(&["measure", "badk", "-k", "2"]);
    assert_eq!(
        r["report"]["lambdas"],
        serde_json::json!(["1/2", "1/1", "3/2"])
    );
    let e = ok_json(&["measure", "eset", "--k-range", "2..2"]);
    let num = e["report"]["measure"]["num"].as_u64().unwrap();
    let den = e["report"]["measure"]["den"].as_u64().unwrap();
    assert_eq!(num * 128, den * 127);
    let f = ok_json(&["measure", "fact1", "--k-range", "1..2"]);
    assert_eq!(f["report"]["rows"][0]["status"], "vacuous");
}

#[test]
fn normality_discrepancy_weakly() {
    let n = ok_json(&[
        "normality",
        "--source",
        "debruijn:3",
        "-n",
        "8",
        "--max-len",
        "3",
    ]);
    assert_eq!(n["report"]["per_len"][0]["deviation"]["num"], 0);
    let d = ok_json(&[
        "discrepancy",
        "--source",
        "constant:1",
        "--word",
        "11",
        "-n",
        "10",
    ]);
    assert_eq!(d["report"]["occurrences"], 9);
    assert_eq!(d["report"]["discrepancy"]["num"], 13);
    assert_eq!(d["report"]["discrepancy"]["den"], 2);
    let w = ok_json(&[
        "weakly",
        "--seed",
        "42",
        "--epsilon",
        "0.02",
        "--k-range",
        "10..14",
    ]);
    assert!(!w["report"]["hits"].as_array().unwrap().is_empty());
    let w = ok_json(&[
        "weakly",
        "--source",
        "constant:0",
        "--epsilon",
        "0.1",
        "--k-range",
        "4..8",
    ]);
    assert!(w["report"]["hits"].as_array().unwrap().is_empty());
}

#[test]
fn threads_flag_does_not_change_report() {
    let a = pgen(&["zstats", "-k", "12", "--threads", "1"]);
    let b = pgen(&["zstats", "-k", "12", "--threads", "4"]);
    assert_eq!(a.stdout, b.stdout);
}
