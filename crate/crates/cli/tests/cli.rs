// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn rnl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rnl"))
        .args(args)
        .env("RNL_COLOR", "0")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn synth(dir: &Path, name: &str, args: &[&str]) -> (String, String) {
    let path = dir.join(name);
    let path = path.to_str().unwrap().to_string();
    let mut all = vec!["synth"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", &path]);
    let o = rnl(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    (path, stdout(&o))
}

#[test]
fn synth_counter_prints_cost() {
    let dir = TempDir::new().unwrap();
    let (path, out) = synth(
        dir.path(),
        "a4.rnl",
        &["--kind", "counter", "--bits", "4", "--mode", "async"],
    );
    assert!(out.lines().any(|l| l == "quantum_cost 23"), "{out}");
    assert!(std::fs::read_to_string(path)
        .unwrap()
        .starts_with(".rnl 1\n"));
}

#[test]
fn synth_tff_has_no_garbage() {
    let o = rnl(&["synth", "--kind", "tff"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l == "garbage 0"));
}

#[test]
fn synth_argument_errors() {
    for args in [
        &[
            "synth", "--kind", "counter", "--bits", "0", "--mode", "sync",
        ][..],
        &["synth", "--kind", "counter", "--bits", "3"],
        &["synth", "--kind", "tff", "--mode", "sync"],
        &["synth", "--kind", "widget"],
    ] {
        let o = rnl(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty());
    }
    let o = rnl(&["synth", "--kind", "tff", "--out", "/nonexistent/dir/x.rnl"]);
    assert!(!o.status.success());
}

#[test]
fn synth_cost_round_trip() {
    let dir = TempDir::new().unwrap();
    for (name, args) in [
        ("ms.rnl", &["--kind", "mstff"][..]),
        ("ca.rnl", &["--kind", "ctff-a"]),
        ("cb.rnl", &["--kind", "ctff-b"]),
        (
            "s5.rnl",
            &["--kind", "counter", "--bits", "5", "--mode", "sync"],
        ),
    ] {
        let (path, printed) = synth(dir.path(), name, args);
        let o = rnl(&["cost", &path]);
        assert_eq!(stdout(&o), printed, "{name}");
    }
}

#[test]
fn cost_formats() {
    let dir = TempDir::new().unwrap();
    let (path, _) = synth(dir.path(), "ms.rnl", &["--kind", "mstff"]);
    let csv = stdout(&rnl(&["cost", &path, "--format", "csv"]));
    assert_eq!(
        csv,
        "gates,quantum_cost,delay,garbage,constants\n4,10,10,2,1\n"
    );
    assert!(csv.contains("10,10,2"));
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&rnl(&["cost", &path, "--format", "json"]))).unwrap();
    assert_eq!(json["quantum_cost"], 10);
    assert_eq!(json["garbage"], 2);
}

#[test]
fn cost_empty_and_malformed() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.rnl");
    std::fs::write(&empty, ".rnl 1\n.lines 1\n.input 0 a\n.output 0 a\n.end\n").unwrap();
    let o = rnl(&["cost", empty.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(stdout(&o).lines().nth(1), Some("0,0,0,0,0"));

    let bad = dir.path().join("bad.rnl");
    std::fs::write(&bad, ".rnl 1\n.lines 2\ngate FG 0 7\n.end\n").unwrap();
    let o = rnl(&["cost", bad.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.rnl:3:11:"));
}

#[test]
fn sim_examples() {
    let dir = TempDir::new().unwrap();
    let (a4, _) = synth(
        dir.path(),
        "a4.rnl",
        &["--kind", "counter", "--bits", "4", "--mode", "async"],
    );
    let out = stdout(&rnl(&["sim", &a4, "--pulses", "5"]));
    assert_eq!(out.lines().count(), 6);
    assert_eq!(out.lines().last(), Some("5 0101"));

    let (s3, _) = synth(
        dir.path(),
        "s3.rnl",
        &["--kind", "counter", "--bits", "3", "--mode", "sync"],
    );
    let out = stdout(&rnl(&["sim", &s3, "--pulses", "8"]));
    assert_eq!(out.lines().last(), Some("8 000"));

    let out = stdout(&rnl(&["sim", &s3, "--pulses", "0"]));
    assert_eq!(out, "0 000\n");

    let out = stdout(&rnl(&["sim", &a4, "--pulses", "4", "--trace"]));
    assert_eq!(out.lines().last(), Some("4 0100 fired=0,1,2"));
}

#[test]
fn sim_rejects_combinational() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("c.rnl");
    std::fs::write(
        &f,
        ".rnl 1\n.lines 2\n.input 0 a\n.input 1 b\n.output 0 a\n.output 1 y\ngate FG 0 1\n.end\n",
    )
    .unwrap();
    let o = rnl(&["sim", f.to_str().unwrap(), "--pulses", "3"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("not sequential"));
}

#[test]
fn verify_theorems_and_gates() {
    let o = rnl(&["verify", "--theorems", "--max-bits", "16"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS async n=16: measured gates 32 garbage 16 quantum 95"));

    let o = rnl(&["verify", "--gates"]);
    assert_eq!(o.status.code(), Some(0));
    let listed: Vec<String> = stdout(&o)
        .lines()
        .filter_map(|l| l.strip_prefix("  PASS "))
        .map(|l| l.split(':').next().unwrap().to_string())
        .collect();
    assert_eq!(listed, ["NOT", "FG", "DFG", "PG", "MPG", "TG"]);

    let o = rnl(&["verify", "--theorems", "--max-bits", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_exhaustive() {
    let dir = TempDir::new().unwrap();
    let (s4, _) = synth(
        dir.path(),
        "s4.rnl",
        &["--kind", "counter", "--bits", "4", "--mode", "sync"],
    );
    assert_eq!(rnl(&["verify", &s4, "--exhaustive"]).status.code(), Some(0));

    let bad = dir.path().join("bad.rnl");
    std::fs::write(
        &bad,
        ".rnl 1\n.lines 2\n.input 0 a\n.input 1 b\n.garbage 0\n.output 1 y\ngate TG 0 1 1\n.end\n",
    )
    .unwrap();
    let o = rnl(&[
        "verify",
        bad.to_str().unwrap(),
        "--exhaustive",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["all_passed"], false);

    let (wide, _) = synth(
        dir.path(),
        "a30.rnl",
        &["--kind", "counter", "--bits", "30", "--mode", "async"],
    );
    let o = rnl(&["verify", &wide, "--exhaustive"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exhaustive bound"));
}

#[test]
fn report_tables_and_scaling() {
    let o = rnl(&["report", "--tables"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text, include_str!("../../core/tests/golden/tables.txt"));
    let row = |name: &str| {
        text.lines()
            .find(|l| l.starts_with(name))
            .unwrap()
            .split_whitespace()
            .rev()
            .take(3)
            .collect::<Vec<_>>()
    };
    assert_eq!(row("Chuang"), ["2", "6", "6"]);
    assert_eq!(row("Rajmohan"), ["12", "55", "55"]);

    let o = rnl(&[
        "report",
        "--scaling",
        "--max-bits",
        "1",
        "--mode",
        "async",
        "--format",
        "csv",
    ]);
    assert_eq!(stdout(&o), "n,mode,measured_qc,predicted_qc\n1,async,5,5\n");

    assert_eq!(
        rnl(&["report", "--tables", "--scaling", "--max-bits", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn output_is_deterministic() {
    let a = rnl(&["report", "--scaling", "--max-bits", "6"]);
    let b = rnl(&["report", "--scaling", "--max-bits", "6"]);
    assert_eq!(a.stdout, b.stdout);
    let a = rnl(&["verify", "--gates"]);
    assert!(!String::from_utf8_lossy(&a.stdout).contains('\x1b'));
}
