use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mgregion"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

fn coefficient(doc: &Value, name: &str) -> f64 {
    doc["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .and_then(|c| c["value"].as_f64())
        .unwrap_or_else(|| panic!("no coefficient {name}"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mgregion-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn region_reproduces_reference_breakpoints() {
    let doc = json(&["region", "--topo", "wyner", "--coop", "both", "--model", "1", "--rho", "0.8", "--rhof", "0.6", "--D", "10"]);
    let outer = doc["regions"].as_array().unwrap().iter().find(|r| r["name"] == "outer").unwrap();
    let v: Vec<(f64, f64)> = serde_json::from_value(outer["region"]["vertices"].clone()).unwrap();
    assert_eq!(v.len(), 4);
    assert!((v[2].0 - 0.24).abs() < 1e-12 && (v[2].1 - 0.5452).abs() < 1e-4, "{v:?}");
    assert!((v[3].1 - 0.7852).abs() < 1e-4);
    assert!((coefficient(&doc, "se_max") - 0.785243).abs() < 5e-5);
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["config"]["scenario"]["rho"], 0.8);
}

#[test]
fn region_hex_rx_slopes() {
    let doc = json(&["region", "--topo", "hex", "--coop", "rx", "--model", "2", "--rho", "0.8", "--rhof", "0.1", "--Dinf"]);
    assert!((coefficient(&doc, "slope_adaptive") - 3.98).abs() < 0.01);
    assert!((coefficient(&doc, "slope_nonadaptive") - 18.0).abs() < 0.01);
}

#[test]
fn validation_errors_exit_with_two() {
    assert_eq!(run(&["region", "--rho", "1.3", "--rhof", "0.1", "--D", "10"]).status.code(), Some(2));
    assert_eq!(run(&["region", "--rho", "0.5", "--rhof", "0.1", "--D", "3"]).status.code(), Some(2));
    assert_eq!(run(&["region", "--rho", "0.5", "--rhof", "0.1"]).status.code(), Some(2));
    assert_eq!(run(&["region", "--topo", "hex", "--rho", "0.5", "--rhof", "0.1", "--D", "4"]).status.code(), Some(2));
    assert_eq!(run(&["topology", "--topo", "hex", "--W", "4", "--H", "4"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--rho", "0.5", "--rhof", "0.1", "--D", "4"]).status.code(), Some(2));
    assert_eq!(run(&["region", "--model", "3", "--rho", "0.5", "--rhof", "0.1", "--D", "4"]).status.code(), Some(2));
}

#[test]
fn csv_output_has_config_line_and_schema_column() {
    let out = run(&["region", "--coop", "rx", "--rho", "0.8", "--rhof", "0.6", "--D", "10", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let first = lines.next().unwrap();
    assert!(first.starts_with("# config: {"), "{first}");
    let config: Value = serde_json::from_str(first.trim_start_matches("# config: ")).unwrap();
    assert_eq!(config["scenario"]["coop"], "rx");
    assert!(lines.next().unwrap().starts_with("schema,"));
    assert!(lines.all(|l| l.starts_with("1,")));
}

#[test]
fn svg_output_is_well_formed() {
    let out = run(&["region", "--rho", "0.8", "--rhof", "0.6", "--D", "10", "--format", "svg"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    assert_eq!(text.matches("<path").count(), 4);
}

#[test]
fn verify_passes_and_filters() {
    let doc = json(&["verify", "--draws", "200"]);
    assert_eq!(doc["pass"], true);
    assert_eq!(doc["checks"].as_array().unwrap().len(), 4);
    let doc = json(&["verify", "--only", "identities", "--terms-tail", "1e-12"]);
    let checks = doc["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 1);
    assert_eq!(checks[0]["check"], "identities");
}

#[test]
fn verify_catches_a_broken_identity() {
    let out = run(&["verify", "--only", "identities", "--inject-sign-flip", "GeomFloor"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL identities"));
}

#[test]
fn simulate_output_does_not_depend_on_workers() {
    let base = ["simulate", "--coop", "rx", "--model", "2", "--rho", "0.8", "--rhof", "0.6", "--D", "10", "--K", "1000", "--trials", "40", "--seed", "9"];
    let one = run(&[&base[..], &["--workers", "1"]].concat());
    let many = run(&[&base[..], &["--workers", "6"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
    let doc: Value = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(doc["pass"], true);
    assert_eq!(doc["config"]["seed"], 9);
}

#[test]
fn replay_reproduces_a_logged_trial() {
    let scenario = ["simulate", "--rho", "0.7", "--rhof", "0.4", "--D", "4", "--K", "120"];
    let dump = run(&[&scenario[..], &["--dump-trial", "5"]].concat());
    assert_eq!(dump.status.code(), Some(0));
    let logged: Value = serde_json::from_slice(&dump.stdout).unwrap();
    let path = tmp("trial.json");
    std::fs::write(&path, &dump.stdout).unwrap();
    let replay = json(&[&scenario[..], &["--replay", path.to_str().unwrap()]].concat());
    assert_eq!(replay["tally"], logged["tally"]);
    assert_eq!(replay["matches_logged_tally"], true);

    let mut tampered = logged.clone();
    let sum = tampered["tally"]["sum_total"].as_f64().unwrap();
    tampered["tally"]["sum_total"] = (sum + 1.0).into();
    std::fs::write(&path, serde_json::to_vec(&tampered).unwrap()).unwrap();
    let out = run(&[&scenario[..], &["--replay", path.to_str().unwrap()]].concat());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_lists_both_schemes_per_grid_point() {
    let doc = json(&["sweep", "--coop", "both", "--model", "2", "--rho-list", "0.4,0.8", "--rhof-list", "0.3,0.6", "--D-list", "4,10"]);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2 * 2 * 2 * 2);
    let hex = json(&["sweep", "--topo", "hex", "--coop", "rx", "--rho-list", "0.8", "--rhof-list", "0.1"]);
    let slope = hex["rows"][0]["slope"].as_f64().unwrap();
    assert!((slope - 5.42).abs() < 0.01, "{slope}");
}

#[test]
fn topology_lists_edges_and_colours() {
    let doc = json(&["topology", "--topo", "hex", "--W", "6", "--H", "6"]);
    assert_eq!(doc["edges"].as_array().unwrap().len(), 36 * 3);
    assert_eq!(doc["colors"][0], 1);
    let doc = json(&["topology", "--K", "5"]);
    assert_eq!(doc["edges"].as_array().unwrap().len(), 4);
    assert_eq!(doc["users"][0], 1);
}
