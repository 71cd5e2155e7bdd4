use std::process::{Command, Output};

use fano12::bounds::Ledger;
use fano12::enumerate::LinkLedger;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fano12")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = run(&full);
    let v = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    (v, out.status.code().unwrap())
}

#[test]
fn links_tsv_has_four_rows() {
    let out = run(&["links", "--genus", "12", "--rank", "2", "--format", "tsv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "row\tZ\tf\tZ+\tf+");
    let labels: Vec<&str> = lines[1..].iter().map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(labels, ["I", "II", "III", "IV"]);
}

#[test]
fn output_is_byte_deterministic() {
    for args in [
        &["--format", "json", "links"][..],
        &["--format", "text", "links"],
        &["--format", "json", "bounds", "prop24"],
        &["--format", "json", "bounds", "verdict"],
        &["--format", "tsv", "dp", "lines", "--degree", "3"],
        &["--format", "json", "solve", "cd", "--deg", "4"],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn unsupported_genus_reports_error() {
    let (v, code) = json(&["links", "--genus", "10"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "UnsupportedGenus");
    assert_eq!(v["error"]["exit_code"], 2);
}

#[test]
fn bad_reference_table_is_an_input_error() {
    let dir = std::env::temp_dir().join(format!("fano12-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let empty = dir.join("empty.tsv");
    std::fs::write(&empty, "name\trho\tkcube\tnotes\ttags\n").unwrap();
    let (v, code) = json(&["--ref-table", empty.to_str().unwrap(), "links"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "ReferenceTable");
    let bad = dir.join("bad.tsv");
    std::fs::write(&bad, "name\trho\tkcube\tnotes\ttags\nP3\t1\tsixty-four\tx\tendpoint\n").unwrap();
    let (v, _) = json(&["--ref-table", bad.to_str().unwrap(), "table"]);
    assert!(v["error"]["message"].as_str().unwrap().contains("line 2"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn failed_checks_exit_one() {
    let out = run(&["dp", "construction", "--target", "P3", "--curve", "1,0,0,0,0,0,0"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["dp", "nef-check", "--degree", "4", "--class", "0,1,0,0,0,0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn link_ledger_round_trips() {
    let (v, code) = json(&["links"]);
    assert_eq!(code, 0);
    let ledger: LinkLedger = serde_json::from_value(v.clone()).unwrap();
    ledger.revalidate().unwrap();
    assert_eq!(ledger.realized().len(), 4);
    assert_eq!(ledger.to_json(), v);
}

#[test]
fn bound_ledgers_round_trip() {
    for (args, key, bound) in [(&["bounds", "prop24"][..], "ledger", 9), (&["bounds", "le10"], "ledger", 10)] {
        let (v, code) = json(args);
        assert_eq!(code, 0);
        assert_eq!(v["bound"], bound);
        let ledger: Ledger = serde_json::from_value(v[key].clone()).unwrap();
        ledger.verify().unwrap();
    }
}

#[test]
fn solver_subcommands() {
    let (v, code) = json(&["solve", "e5", "--delta", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["status"]["status"], "no_solutions");
    assert_eq!(v["audit"]["certificate_kind"], "modular_obstruction");
    assert_eq!(v["replay"], "ok");
    let (v, _) = json(&["solve", "cd", "--deg", "0"]);
    assert_eq!(v["extra"]["fiber_degree"], "5");
    let (v, _) = json(&["solve", "dd", "--fiber", "7"]);
    assert_eq!(v["audit"]["status"], "no_solutions");
}

#[test]
fn orbit_and_bundle() {
    let (v, code) = json(&["bounds", "orbit", "--degree", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["min_orbit"], 22);
    let (v, code) = json(&["bundle", "numerics"]);
    assert_eq!(code, 0);
    assert_eq!(v["bundle"]["kcube"], "22");
}
