use std::process::{Command, Output};

use serde_json::Value;

fn jacarith(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jacarith")).args(args).output().expect("spawn jacarith")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn desk_report_passes() {
    let out = jacarith(&["report", "--p", "2", "--q", "4", "--r", "3", "--d", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["results"]["lfunction"]["L"]["text"], "1 - 8T + 16T^2");
    assert_eq!(v["results"]["rank"]["analytic_rank"], 2);
    assert_eq!(v["results"]["rank"]["descent_rank"]["z_rank"], 2);
    assert_eq!(v["results"]["bsd"]["sha_index_ratio"]["num"], 1);
    assert_eq!(v["results"]["bsd"]["sha_index_ratio"]["den"], 1);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["pass"] == true));
    assert!(checks.iter().any(|c| c["name"] == "lfunction.dual_path"));
}

#[test]
fn lfunction_dual_path() {
    let out = jacarith(&["lfunction", "--q", "5", "--r", "2", "--d", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["results"]["L"]["degree"], 2);
    let dual = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "dual_path").unwrap();
    assert_eq!(dual["pass"], true);
}

#[test]
fn monodromy_exceptional_factor() {
    let out = jacarith(&["monodromy", "--r", "10", "--ell", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let labels: Vec<&str> = v["results"]["monodromy"]["factors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["label"].as_str().unwrap())
        .collect();
    assert!(labels.contains(&"Ã_5"));
    assert_eq!(v["results"]["monodromy"]["order"], 2_073_600);
}

#[test]
fn output_is_deterministic() {
    let args = ["report", "--q", "5", "--r", "2", "--d", "4"];
    let (a, b) = (jacarith(&args), jacarith(&args));
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn regime_violation_is_a_usage_error() {
    let out = jacarith(&["heights", "--r", "3", "--d", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("requires r | d"));
    let out = jacarith(&["lfunction", "--q", "6", "--r", "2", "--d", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = jacarith(&["lfunction", "--q", "4", "--r", "2", "--d", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_tables() {
    let out = jacarith(&["bsd", "--p", "2", "--q", "4", "--r", "3", "--d", "3", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("place,c_v,d_v,a_v,m_v,g_v"));
    assert_eq!(lines.next(), Some("u=0,2,27,0,2,0"));
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_jacarith"))
        .args(["lfunction", "--q", "4", "--r", "3", "--d", "3"])
        .env("JACARITH_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert!(!files.is_empty());
}
