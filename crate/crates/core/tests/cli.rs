use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn dmf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dmf")).args(args).output().expect("dmf runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn golden(name: &str, args: &[&str]) {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    let out = dmf(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    if std::env::var_os("DMF_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &out.stdout).unwrap();
    }
    let want = std::fs::read(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert!(out.stdout == want, "{name} differs from its golden file; rerun with DMF_UPDATE_GOLDEN=1 if intended");
}

#[test]
fn golden_invariants() {
    golden("invariants_q2_deg2.json", &["invariants", "--deg-max", "2"]);
}

#[test]
fn golden_invariants_csv() {
    golden("invariants_q3_deg1.csv", &["--q", "3", "--format", "csv", "invariants", "--deg-max", "1"]);
}

#[test]
fn golden_smb() {
    golden("smb_rank3.json", &["--P", "8", "smb", "--builtin", "rank3-cbrt"]);
}

#[test]
fn golden_eis() {
    golden("eis_rank2_k3.json", &["--P", "12", "eis", "--builtin", "rank2-sqrt", "--k", "3"]);
}

#[test]
fn golden_drinfeld() {
    golden("drinfeld_phi_rank2.json", &["--P", "12", "drinfeld", "--builtin", "rank2-sqrt", "--what", "phi"]);
}

#[test]
fn golden_verify_subset() {
    golden("verify_counts.json", &["verify", "--suite", "cusp-count,curve-invariants"]);
}

#[test]
fn report_envelope() {
    let v = json(&dmf(&["--seed", "9", "--P", "20", "smb", "--builtin", "carlitz"]));
    assert_eq!(v["schema"], "dmf-report/1");
    assert_eq!(v["command"], "smb");
    assert_eq!(v["config"]["seed"], 9);
    assert_eq!(v["config"]["precision"], 20);
    assert!(v["result"].is_object());
}

#[test]
fn verify_passes_with_defaults() {
    let out = dmf(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["failed"], 0);
    let names: Vec<&str> = v["result"]["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    let listed = json(&dmf(&["verify", "--suite", "list"]));
    let registry: Vec<&str> = listed["result"]["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, registry);
}

#[test]
fn corrupted_g1_fails_the_functional_equation() {
    let out = dmf(&["verify", "--suite", "functional-equation", "--corrupt-g1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["result"]["checks"][0]["status"], "fail");
}

#[test]
fn tiny_precision_is_insufficient_not_failing() {
    let out = dmf(&["--P", "8", "verify"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    let checks = v["result"]["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["status"] != "fail"));
    assert!(checks.iter().filter(|c| c["status"] == "precision-insufficient").count() >= 3);
}

#[test]
fn exit_codes() {
    assert_eq!(dmf(&["--q", "6", "smb", "--builtin", "carlitz"]).status.code(), Some(3));
    assert_eq!(dmf(&["--bogus"]).status.code(), Some(64));
    assert_eq!(dmf(&["verify", "--suite", "no-such-check"]).status.code(), Some(64));
    assert_eq!(dmf(&["--help"]).status.code(), Some(0));
}

#[test]
fn csv_and_out_file() {
    let dir = std::env::temp_dir().join(format!("dmf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("inv.csv");
    let out = dmf(&["--format", "csv", "--out", file.to_str().unwrap(), "invariants", "--deg-max", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&file).unwrap();
    assert!(text.starts_with("N,lambda,genus,cusps"));
    assert_eq!(text.lines().count(), 3);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn reports_are_deterministic() {
    let args = ["--q", "3", "--seed", "4", "verify", "--suite", "covariance,separation,scaling"];
    assert_eq!(dmf(&args).stdout, dmf(&args).stdout);
}
