//! End-to-end CLI tests through the compiled binary.

use serde_json::Value;
use std::path::Path;
use std::process::Command;

fn narrowcap() -> Command {
    Command::new(env!("CARGO_BIN_EXE_narrowcap"))
}

fn write_scene(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const TWO_PATCH: &str = r#"{
    "version": 1,
    "domain": { "kind": "disk-interior" },
    "patches": [
        { "center_angle": 0.0, "half_length": 0.1, "bc": { "type": "dirichlet" } },
        { "center_angle": 3.141592653589793, "half_length": 0.2, "bc": { "type": "dirichlet" } }
    ]
}"#;

fn run_json(args: &[&str]) -> Value {
    let out = narrowcap().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn splitting_reports_chi_and_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(dir.path(), "two.json", TWO_PATCH);
    let report = run_json(&["splitting", "--scene", &scene, "--target", "1"]);
    let chi = report["outputs"]["chi"].as_f64().unwrap();
    assert!((chi - 0.448153).abs() < 1e-4, "chi = {chi}");
    assert!(report["inputs_digest"].as_str().unwrap().len() == 64);
    let a = report["outputs"]["coefficients"].as_array().unwrap();
    assert_eq!(a.len(), 2);
    let sum: f64 = a.iter().map(|v| v.as_f64().unwrap()).sum();
    assert!(sum.abs() < 1e-9);
}

#[test]
fn grid_csv_has_header_and_empty_outside() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(dir.path(), "two.json", TWO_PATCH);
    let csv_path = dir.path().join("grid.csv");
    let report = run_json(&[
        "splitting",
        "--scene",
        &scene,
        "--target",
        "1",
        "--grid",
        "11",
        "11",
        "--grid-out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(report["outputs"]["chi"].is_number());
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,y,value");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 121);
    // corner outside the disk has an empty value; all values capped in [0,1]
    assert!(rows[0].ends_with(','));
    for row in &rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 3);
        if !fields[2].is_empty() {
            let v: f64 = fields[2].parse().unwrap();
            assert!((0.0..=1.0).contains(&v), "uncapped value {v}");
        }
    }
}

#[test]
fn deterministic_outputs_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(dir.path(), "two.json", TWO_PATCH);
    let r1 = run_json(&["splitting", "--scene", &scene, "--target", "2"]);
    let r2 = run_json(&["splitting", "--scene", &scene, "--target", "2"]);
    assert_eq!(r1["outputs"], r2["outputs"]);
    assert_eq!(r1["inputs_digest"], r2["inputs_digest"]);
}

#[test]
fn schema_error_is_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(
        dir.path(),
        "bad.json",
        r#"{ "version": 1, "domain": { "kind": "disk-interior" }, "patches": [], "junk": 1 }"#,
    );
    let out = narrowcap()
        .args(["splitting", "--scene", &scene, "--target", "1"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["code"], "schema");
}

#[test]
fn mfrt_exterior_unsupported() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(
        dir.path(),
        "ext.json",
        r#"{
            "version": 1,
            "domain": { "kind": "disk-exterior" },
            "patches": [
                { "center_angle": 0.0, "half_length": 0.1, "bc": { "type": "dirichlet" } }
            ]
        }"#,
    );
    let out = narrowcap().args(["mfrt", "--scene", &scene]).output().unwrap();
    assert!(!out.status.success());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["code"], "unsupported");
}

#[test]
fn basis_table_columns() {
    let report = run_json(&["basis", "--k", "11", "--m", "40"]);
    let modes = report["outputs"]["modes"].as_array().unwrap();
    assert_eq!(modes.len(), 11);
    assert_eq!(modes[0]["mu"].as_f64().unwrap(), 0.0);
    let mu2 = modes[2]["mu"].as_f64().unwrap();
    assert!((mu2 - 3.4533).abs() < 5e-3, "mu2 = {mu2}");
    assert_eq!(modes[1]["parity"], "odd");
}

#[test]
fn basis_cache_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let r1 = run_json(&[
        "basis",
        "--k",
        "11",
        "--m",
        "40",
        "--cache-dir",
        cache.to_str().unwrap(),
    ]);
    let files: Vec<_> = std::fs::read_dir(&cache).unwrap().collect();
    assert_eq!(files.len(), 1, "cache sidecar written");
    let r2 = run_json(&[
        "basis",
        "--k",
        "11",
        "--m",
        "40",
        "--cache-dir",
        cache.to_str().unwrap(),
    ]);
    assert_eq!(r1["outputs"], r2["outputs"]);
}

#[test]
fn kappa_table_matches_reference() {
    let report = run_json(&["kappa", "--n", "64", "--mode", "all"]);
    let rows = report["outputs"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 32);
    let row3 = rows.iter().find(|r| r["j"] == 3).unwrap();
    assert!((row3["exact"].as_f64().unwrap() - 6.5104).abs() < 5e-4);
    assert!((row3["cubic"].as_f64().unwrap() - 6.5147).abs() < 5e-4);
}

#[test]
fn cfun_sweep_and_pole_marking() {
    let report = run_json(&[
        "--basis-k",
        "11",
        "--basis-m",
        "40",
        "cfun",
        "--from",
        "-4.0",
        "--to",
        "1.0",
        "--points",
        "11",
    ]);
    let values = report["outputs"]["values"].as_array().unwrap();
    assert_eq!(values.len(), 11);
    // mu = -3.4533... lies in the sweep range; nearby points evaluate fine,
    // the exact pole (mu = 0 here at i = 8) errors out
    let at_zero = values.iter().find(|v| v["mu"] == 0.0).unwrap();
    assert_eq!(at_zero["error"], "pole");
}

#[test]
fn snd_subcommand_two_patch() {
    let dir = tempfile::tempdir().unwrap();
    let eps1 = std::f64::consts::PI / 12.0;
    let eps2 = std::f64::consts::PI / 6.0;
    let scene = write_scene(
        dir.path(),
        "snd.json",
        &format!(
            r#"{{
                "version": 1,
                "domain": {{ "kind": "disk-interior" }},
                "patches": [
                    {{ "center_angle": 0.0, "half_length": {eps1}, "bc": {{ "type": "steklov" }} }},
                    {{ "center_angle": 3.141592653589793, "half_length": {eps2},
                       "bc": {{ "type": "dirichlet" }} }}
                ]
            }}"#
        ),
    );
    let report = run_json(&["snd", "--scene", &scene, "--roots", "3"]);
    let inv = report["outputs"]["inv_eps1_sigma0"].as_f64().unwrap();
    let expect = 2.0 / std::f64::consts::PI * (-(eps1 * eps2).ln() + 1.5 + 2.0 * 2.0_f64.ln());
    assert!((inv - expect).abs() < 1e-9, "{inv} vs {expect}");
    assert_eq!(report["outputs"]["mu_hat"].as_array().unwrap().len(), 3);
}

#[test]
fn interior_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(
        dir.path(),
        "int.json",
        r#"{
            "version": 1,
            "domain": { "kind": "disk-interior" },
            "targets": [
                { "center": [-0.5, 0.0], "size": 0.05, "bc": { "type": "dirichlet" } },
                { "center": [0.5, 0.0], "size": 0.05, "bc": { "type": "dirichlet" } }
            ]
        }"#,
    );
    let report = run_json(&["interior", "--scene", &scene, "--target", "1"]);
    let chi = report["outputs"]["chi"].as_f64().unwrap();
    assert!((chi - 0.5).abs() < 1e-12);
}

#[test]
fn oracle_annulus_subcommand() {
    let report = run_json(&["oracle", "--what", "steklov", "--annulus", "0.05", "--modes", "3"]);
    let sigma = report["outputs"]["sigma"].as_array().unwrap();
    let s0 = sigma[0].as_f64().unwrap();
    assert!((s0 - 1.0 / (20.0_f64).ln()).abs() < 1e-12);
}
