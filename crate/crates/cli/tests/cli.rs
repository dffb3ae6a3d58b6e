// SPDX-License-Identifier: Apache-2.0
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdi-adder"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn example_delays() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/example_delays.json")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes a generated netlist after `edit` has rewritten its JSON.
fn edited_netlist(dir: &TempDir, args: &[&str], edit: impl FnOnce(&mut Value)) -> PathBuf {
    let out = dir.path().join("gen.json");
    let mut full = vec!["build"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", path_str(&out)]);
    assert_eq!(code(&run(&full)), 0);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    edit(&mut v);
    let path = dir.path().join("edited.json");
    std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    path
}

#[test]
fn build_prints_census() {
    let o = run(&["build", "safa"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["gates"].as_array().unwrap().len(), 10);
    assert!(String::from_utf8_lossy(&o.stderr).contains("OR2:2 AO22:4 C2:4"));
}

#[test]
fn bad_parameters_are_usage_errors() {
    assert_eq!(code(&run(&["build", "rca", "--width", "5", "--safa", "2"])), 2);
    assert_eq!(code(&run(&["build", "rca", "--width", "4", "--safa", "6"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn malformed_netlist_is_a_parse_error() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{ not json").unwrap();
    assert_eq!(code(&run(&["sta", "--netlist", path_str(&p)])), 3);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&run(&["sta", "--netlist", path_str(&missing)])), 1);
}

#[test]
fn sta_reports_registered_adder11() {
    let o = run(&["sta", "rca", "--width", "32", "--safa", "2"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("latency: 20 ps"), "{s}");
    assert!(s.contains("formula match: yes"));
}

#[test]
fn compare_practical_rows() {
    let o = run(&["compare", "--legend", "Adder13", "--legend", "Adder15"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    let row = |name: &str| s.lines().find(|l| l.starts_with(&format!("{name},"))).unwrap().to_string();
    assert!(row("Adder13").contains(",35.3,"));
    assert!(row("Adder15").contains(",22.7,"));
    let o = run(&["compare", "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 17);
}

#[test]
fn sweep_finds_two_single_bit_stages() {
    let o = run(&["sweep", "--delays", path_str(&example_delays())]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("# argmin: {2}"));
}

#[test]
fn swapped_sum_rails_fail_verification() {
    let dir = TempDir::new().unwrap();
    let p = edited_netlist(&dir, &["rca", "--width", "2", "--safa", "2"], |v| {
        let out = v["outputs"][0].as_object_mut().unwrap();
        let r1 = out["rail1"].clone();
        out.insert("rail1".into(), out["rail0"].clone());
        out.insert("rail0".into(), r1);
    });
    let o = run(&["verify", "--netlist", path_str(&p), "--width", "2"]);
    assert_eq!(code(&o), 4, "{}", stdout(&o));
}

#[test]
fn stuck_acknowledge_is_a_deadlock() {
    let dir = TempDir::new().unwrap();
    let p = edited_netlist(&dir, &["rca", "--width", "1", "--safa", "1", "--stage"], |v| {
        let ackout = v["acks"]["ackout"].as_str().unwrap().to_string();
        for g in v["gates"].as_array_mut().unwrap() {
            if g["out"] == ackout.as_str() {
                g["out"] = "dead".into();
            }
        }
        let (r1, r0) = (v["outputs"][0]["rail1"].clone(), v["outputs"][0]["rail0"].clone());
        v["gates"].as_array_mut().unwrap().push(serde_json::json!({
            "id": "jam", "kind": "AND4", "in": ["dead", r1, r0, "dead"], "out": ackout
        }));
    });
    let o = run(&["sim", "--netlist", path_str(&p), "--count", "2"]);
    assert_eq!(code(&o), 5);
    assert!(String::from_utf8_lossy(&o.stderr).contains("deadlock"));
}

#[test]
fn sim_writes_results_and_vcd() {
    let dir = TempDir::new().unwrap();
    let vectors = dir.path().join("v.txt");
    std::fs::write(&vectors, "# a b cin\n1 2 0\nff ff 1\n").unwrap();
    let vcd = dir.path().join("run.vcd");
    let o = run(&[
        "sim", "rca", "--width", "8", "--safa", "2", "--vectors", path_str(&vectors), "--vcd", path_str(&vcd),
    ]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("0,1,2,0,3,0,"));
    assert!(s.contains("1,ff,ff,1,ff,1,"));
    assert!(std::fs::read_to_string(&vcd).unwrap().contains("$enddefinitions"));
}

#[test]
fn reruns_are_byte_identical() {
    for args in [
        &["sim", "rca", "--width", "16", "--count", "20"][..],
        &["verify", "rca", "--width", "32", "--mode", "random", "--count", "200"][..],
        &["classify", "dafa"][..],
        &["compare", "--source", "formula", "--format", "json"][..],
    ] {
        let (a, b) = (run(args), run(args));
        assert_eq!(code(&a), 0, "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn verify_equation_checks() {
    for c in [&["verify", "safa"][..], &["verify", "dafa", "--non-redundant"][..]] {
        assert_eq!(code(&run(c)), 0, "{c:?}");
    }
}
