use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qdirac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdirac")).args(args).output().expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn empty_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "empty.cfg", "\n# nothing here\n");
    let out = qdirac(&["su2-clifford", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no settings"));
}

#[test]
fn bad_arguments_exit_2() {
    for args in [
        &["su2-clifford", "--q", "1.2"][..],
        &["su2-clifford", "--q", "abc"],
        &["su2-clifford", "--precision", "32"],
        &["su2-clifford", "--tol", "su2.clifford"],
        &["su2-clifford", "--tol", "su2.clifford=-1"],
        &["su2-clifford", "--jmax", "1.25"],
        &["podles", "--lmax", "3"],
        &["no-such-command"],
    ] {
        assert_eq!(qdirac(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn spectrum_csv_table() {
    let out = qdirac(&["su2-spectrum", "--q", "0.5", "--jmax", "3", "--format", "csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = text.lines();
    assert_eq!(rows.next(), Some("k,value,multiplicity,two_j,arrow,isospectral"));
    let body: Vec<Vec<&str>> = rows.map(|r| r.split(',').collect()).collect();
    // j = 1/2 ↑: [1] = 1 with multiplicity 3·2 = 6
    let up_half = body.iter().find(|r| r[3] == "1" && r[4] == "up").expect("j = 1/2 row");
    assert_eq!(up_half[2], "6");
    assert!((up_half[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    // j = 1 ↓: [-4] at q = 0.5 is -(8 + 2 + 1/2 + 1/8)
    let down_one = body.iter().find(|r| r[3] == "2" && r[4] == "down").expect("j = 1 row");
    assert_eq!(down_one[2], "6");
    assert!((down_one[1].parse::<f64>().unwrap() + 10.625).abs() < 1e-12);
}

#[test]
fn reports_are_deterministic_sorted_and_doubled() {
    let a = qdirac(&["su2-clifford", "--q", "0.5", "--jmax", "3/2"]);
    let b = qdirac(&["su2-clifford", "--q", "0.5", "--jmax", "1.5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let ls = lines(&a);
    let ids: Vec<&str> = ls.iter().map(|l| l["check"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    for l in &ls {
        assert_eq!(l["params"]["q"], "0.5");
        assert_eq!(l["pass"], true);
        if let Some(j) = l["params"].get("two_j_max") {
            assert_eq!(j, 3);
        }
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", "q = 0.3\ntol.su2.clifford = 1e-24\n");
    let ls = lines(&qdirac(&["su2-clifford", "--config", &cfg]));
    let c = ls.iter().find(|l| l["check"] == "su2.clifford").unwrap();
    assert_eq!(c["params"]["q"], "0.3");
    // serde_json's default float parser is not correctly rounded
    let tol = c["tolerance"].as_f64().unwrap();
    assert!((tol / 1e-24 - 1.0).abs() < 1e-12);
    let ls = lines(&qdirac(&["su2-clifford", "--config", &cfg, "--q", "0.7"]));
    assert!(ls.iter().all(|l| l["params"]["q"] == "0.7"));
}

#[test]
fn failing_check_sets_exit_status() {
    let out = qdirac(&["su2-clifford", "--tol", "su2.clifford=1e-40"]);
    assert_eq!(out.status.code(), Some(1));
    let ls = lines(&out);
    let c = ls.iter().find(|l| l["check"] == "su2.clifford").unwrap();
    assert_eq!(c["pass"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL su2.clifford"));
}

#[test]
fn out_dir_and_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = qdirac(&["su2-spectrum", "--jmax", "2", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    let saved = std::fs::read(out_dir.join("reports.jsonl")).unwrap();
    assert_eq!(saved, out.stdout);
    assert!(out_dir.join("su2_spectrum.csv").exists());

    let golden = out_dir.join("reports.jsonl");
    let same = qdirac(&["su2-spectrum", "--jmax", "2", "--golden", golden.to_str().unwrap()]);
    assert_eq!(same.status.code(), Some(0));
    let other = qdirac(&["su2-spectrum", "--jmax", "5/2", "--golden", golden.to_str().unwrap()]);
    assert_eq!(other.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&other.stderr).contains("differs from golden"));
}

#[test]
fn uq2_report_at_reference_settings() {
    let out = qdirac(&["uq2", "--q", "0.5", "--jmax", "4", "--cmax", "6", "--probe-order", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ls = lines(&out);
    let dim = ls.iter().find(|l| l["check"] == "uq2.dimension").unwrap();
    let e = dim["fit"]["value"].as_f64().unwrap();
    assert!((3.7..=4.3).contains(&e));
    assert_eq!(dim["params"]["two_c_max"], 12);
    assert_eq!(dim["params"]["two_j_max"], 8);
    assert!(ls.iter().all(|l| l["pass"] == true));
}
