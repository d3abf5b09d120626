use std::process::{Command, Output};
use std::sync::Arc;

use soergel_core::coxeter::{CoxeterDatum, CoxeterGroup};
use soergel_core::hecke::Hecke;

fn soergel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_soergel")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn kl_table_of_a2() {
    let o = soergel(&["kl", "--type", "A2", "--format", "tsv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x\tlength\tc_x");
    assert_eq!(lines.len(), 7);
    let g = Arc::new(CoxeterGroup::new(CoxeterDatum::from_label("A2").unwrap(), None).unwrap());
    let sts = g.element_of(&[0, 1, 0]).unwrap();
    let expect = Hecke::new(g.clone()).kl_element(sts).unwrap().display(&g).to_string();
    assert_eq!(lines[6], format!("s1.s2.s1\t3\t{expect}"));
}

#[test]
fn bad_primes_of_a1_are_empty() {
    let o = soergel(&["badprimes", "--type", "A1", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["D"], serde_json::json!([]));
    assert_eq!(v["datum"], "A1");
}

#[test]
fn verify_a2_passes() {
    let o = soergel(&["verify", "--type", "A2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["region_size"], 6);
}

#[test]
fn leaves_and_projector_commands() {
    let o = soergel(&["leaves", "--type", "A2", "--word", "121", "--format", "tsv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 9);
    let o = soergel(&["projector", "--type", "A2", "--word", "s1.s2.s1", "--char", "5", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["matches_kl"], true);
    assert_eq!(v["mod_p"]["reduced"], true);
    assert_eq!(v["blocks"].as_array().unwrap().len(), 1);
    let o = soergel(&["character", "--type", "B2", "--word", "2121"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("equals the KL basis element: true"));
}

#[test]
fn usage_errors_exit_with_2() {
    for args in [
        vec!["kl"],
        vec!["kl", "--type", "A2", "--char", "2"],
        vec!["kl", "--type", "A2", "--char", "9"],
        vec!["kl", "--type", "A1~"],
        vec!["projector", "--type", "A2", "--word", "11"],
        vec!["frobnicate", "--type", "A2"],
    ] {
        assert_eq!(soergel(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn cache_hits_reproduce_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let cold = soergel(&["badprimes", "--type", "A2", "--format", "json", "--cache-dir", d]);
    let warm = soergel(&["badprimes", "--type", "A2", "--format", "json", "--cache-dir", d]);
    assert!(cold.status.success() && warm.status.success());
    assert_eq!(cold.stdout, warm.stdout);
    let nocache = soergel(&["badprimes", "--type", "A2", "--format", "json"]);
    assert_eq!(cold.stdout, nocache.stdout);
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);

    // A record written by another format version is ignored and rewritten.
    let path = files[0].as_ref().unwrap().path();
    let mut rec: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    rec["format"] = serde_json::json!(0);
    rec["payload"] = serde_json::json!("stale");
    std::fs::write(&path, rec.to_string()).unwrap();
    let again = soergel(&["badprimes", "--type", "A2", "--format", "json", "--cache-dir", d]);
    assert_eq!(again.stdout, cold.stdout);
}

#[test]
fn affine_region_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.tsv");
    let o = soergel(&["badprimes", "--type", "A1~", "--top", "s1.s2.s1.s2", "--format", "tsv", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().next(), Some("x\tz\tmultiplicity\tdet\tprimes"));
    assert!(text.contains("s1.s2.s1.s2\ts1.s2\t1\t-3/2\t3"));
}
