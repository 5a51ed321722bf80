use std::path::PathBuf;
use std::process::Command;

use clap::Parser;
use flowvol_cli::{exit, run, run_command, Cli, Outcome, RunReport};
use serde_json::Value;

fn cli(args: &[&str]) -> Cli {
    let mut full = vec!["flowvol"];
    full.extend_from_slice(args);
    Cli::try_parse_from(full).expect("arguments parse")
}

fn report(args: &[&str]) -> RunReport {
    run_command(&cli(args).command).expect("command succeeds")
}

fn outcome(args: &[&str]) -> Outcome {
    run(&cli(args))
}

fn values(r: &RunReport, quantity: &str) -> Vec<String> {
    r.quantity(quantity).unwrap_or_else(|| panic!("no quantity {quantity}")).values.iter().map(|(_, v)| v.clone()).collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("flowvol-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn volume_all_methods_agree_on_k4() {
    let r = report(&["volume", "k4", "--netflow", "1,1,1", "--method", "all"]);
    assert_eq!(values(&r, "volume"), vec!["4"; 4]);
    assert!(r.agreement());
    assert_eq!(outcome(&["volume", "k4", "--netflow", "1,1,1"]).code, exit::OK);
}

#[test]
fn volume_of_ps3_and_doubled_path_file() {
    assert_eq!(values(&report(&["volume", "ps3", "--netflow", "1,1,1"]), "volume"), vec!["16"; 4]);

    let path = scratch("doubled.json");
    std::fs::write(&path, r#"{"n": 2, "edges": [[1,2],[1,2],[2,3],[2,3]]}"#).unwrap();
    let spec = format!("@{}", path.display());
    assert_eq!(values(&report(&["volume", &spec, "--netflow", "1,1"]), "volume"), vec!["4"; 4]);

    let text = scratch("doubled.txt");
    std::fs::write(&text, "2\n1 2\n1 2\n2 3\n2 3\n").unwrap();
    let r = report(&["volume", text.to_str().unwrap(), "--netflow", "1,1", "--method", "lidskii"]);
    assert_eq!(values(&r, "volume"), vec!["4"]);
}

#[test]
fn points_all_methods() {
    let r = report(&["points", "k4", "--netflow", "1,1,1", "--method", "all"]);
    assert_eq!(values(&r, "points"), vec!["7"; 4]);
    assert_eq!(values(&report(&["points", "ps3", "--netflow", "1,1,1"]), "points"), vec!["14"; 4]);
    for g in ["k4", "ps3", "pic:1,2,1", "n=2;edges=1-2,1-2,2-3,2-3"] {
        let zeros = vec!["0"; if g.starts_with("n=") { 2 } else { 3 }].join(",");
        assert_eq!(values(&report(&["points", g, "--netflow", &zeros]), "points"), vec!["1"; 4], "{g}");
    }
}

#[test]
fn ehrhart_polynomial_and_values() {
    let r = report(&["ehrhart", "n=2;edges=1-2,1-2,2-3,2-3", "--poly"]);
    assert_eq!(values(&r, "ehrhart polynomial"), vec!["2t^2+3t+1"]);
    let r = report(&["ehrhart", "k4", "--netflow", "1,1,1", "--eval", "1"]);
    assert_eq!(values(&r, "K(t a) at t=1"), vec!["7", "7"]);
    let r = report(&["ehrhart", "k4", "--eval", "0"]);
    assert_eq!(values(&r, "K(t a) at t=0"), vec!["1", "1"]);
}

#[test]
fn cell_census() {
    let r = report(&["cells", "k4", "--netflow", "1,1,1"]);
    assert_eq!(r.details["cells"].as_array().unwrap().len(), 2);
    assert!(values(&r, "N (cell types)").iter().all(|v| v == "2"));
    assert!(values(&r, "M (cells at a = 1)").iter().all(|v| v == "2"));

    let r = report(&["cells", "k5", "--netflow", "1,1,1,1"]);
    assert!(values(&r, "N (cell types)").iter().all(|v| v == "7"));
    assert!(values(&r, "M (cells at a = 1)").iter().all(|v| v == "10"));

    let r = report(&["cells", "ps3", "--netflow", "1,1,1"]);
    assert!(values(&r, "N (cell types)").iter().all(|v| v == "5"));
    assert!(values(&r, "M (cells at a = 1)").iter().all(|v| v == "5"));
    assert!(r.agreement());
}

#[test]
fn tree_exports() {
    let out = outcome(&["tree", "k4", "--kind", "ccrt", "--format", "dot"]);
    assert_eq!(out.code, exit::OK);
    assert!(out.stdout.contains("G(3,2,1)") && out.stdout.contains("G(4,1,1)"));

    let path = scratch("brt.json");
    let out = outcome(&["tree", "k4", "--kind", "brt", "--out", path.to_str().unwrap()]);
    assert_eq!(out.code, exit::OK);
    let tree: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(tree["schema"], "flowvol/1");
    let leaves: Vec<&Value> = tree["nodes"].as_array().unwrap().iter().filter(|n| n["leaf"] == true).collect();
    assert!(leaves.iter().any(|n| n["boxed"] == true && n["full_dimensional"] == true));
    assert!(leaves.iter().any(|n| n["boxed"] == false && n["full_dimensional"] == false));

    let out = outcome(&["tree", "k5", "--kind", "brt", "--node-cap", "5"]);
    assert_eq!(out.code, exit::TRUNCATED);
    assert!(out.stdout.contains("\"truncated\": true"));
    assert!(out.stderr.contains("truncated"));
}

#[test]
fn verify_corpora() {
    let r = report(&["verify", "--corpus", "builtin"]);
    assert!(r.agreement(), "{:?}", r.failures);
    let r = report(&["verify", "--corpus", "random", "--seed", "7", "--max-n", "4", "--max-m", "8", "--count", "60"]);
    assert!(r.agreement(), "{:?}", r.failures);
    let r = report(&["verify", "--max-n", "1", "--count", "20"]);
    assert!(r.agreement());
}

#[test]
fn families() {
    assert_eq!(values(&report(&["family", "cry", "--n", "5"]), "volume"), vec!["10"; 4]);
    assert_eq!(values(&report(&["family", "tesler", "--n", "4"]), "volume"), vec!["160"; 2]);
    assert_eq!(values(&report(&["family", "ckm", "--n", "3"]), "volume"), vec!["4"; 2]);
    let r = report(&["family", "ps", "--netflow", "1,1,1"]);
    assert_eq!(values(&r, "volume"), vec!["16"; 3]);
    assert_eq!(values(&r, "points"), vec!["14"; 2]);
    assert!(report(&["family", "pic", "--c", "1,2,1", "--netflow", "2,0,1"]).agreement());
    assert_eq!(values(&report(&["family", "parking", "--n", "4"]), "parking functions"), vec!["125"; 2]);
    let r = report(&["family", "words", "--graph", "k4"]);
    assert_eq!(r.details["distinct_words"], 4);
    assert!(report(&["family", "block", "--c", "2", "--d", "1", "--n", "3"]).agreement());
    assert_eq!(outcome(&["family", "cry"]).code, exit::ERROR);
}

#[test]
fn json_reports_are_deterministic_and_stringly() {
    let args = ["volume", "k5", "--netflow", "1,1,1,1", "--json"];
    let a = outcome(&args);
    let b = outcome(&args);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a.stdout).unwrap();
    assert_eq!(v["schema"], "flowvol/1");
    assert_eq!(v["agreement"], true);
    assert!(v.get("timing_ms").is_none());
    let first = &v["results"][0]["values"][0]["value"];
    assert_eq!(first, "160");
    assert_eq!(v["results"][0]["agreement"][0].as_array().unwrap().len(), 4);

    let timed: Value = serde_json::from_str(&outcome(&["volume", "k4", "--json", "--timing"]).stdout).unwrap();
    assert!(timed["timing_ms"]["lidskii"].is_number());
}

#[test]
fn errors_surface_verbatim() {
    let out = outcome(&["volume", "n=3;edges=1-2,2-4,1-4", "--netflow", "1,1,1"]);
    assert_eq!(out.code, exit::ERROR);
    assert!(out.stderr.contains("vertex 3 has no outgoing edge"), "{}", out.stderr);

    let out = outcome(&["volume", "k4", "--netflow", "1,1"]);
    assert_eq!(out.code, exit::ERROR);
    assert!(out.stderr.contains("netflow has 2 free entries"));

    let out = outcome(&["volume", "zz9"]);
    assert_eq!(out.code, exit::ERROR);
    assert!(out.stderr.contains("parse error"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_flowvol");
    let ok = Command::new(bin).args(["volume", "k4", "--netflow", "1,1,1"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(exit::OK));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("agreement  yes"));
    let cut = Command::new(bin).args(["tree", "k5", "--node-cap", "3"]).output().unwrap();
    assert_eq!(cut.status.code(), Some(exit::TRUNCATED));
    let bad = Command::new(bin).args(["points", "k4", "--netflow", "x"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
