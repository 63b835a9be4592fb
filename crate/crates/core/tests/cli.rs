//! End-to-end runs of the `toda-tau` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

const ONE_SITE: &str = r#"{"q": {"n_min": 0, "n_max": 0, "a": [1.0], "b": [0.3]}"#;

fn write_config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(cmd: &str, config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toda-tau"))
        .args([cmd, "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn error_line(o: &Output) -> Value {
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    assert_eq!(text.trim_end().lines().count(), 1, "{text}");
    serde_json::from_str(text.trim_end()).unwrap()
}

#[test]
fn tau_matches_closed_forms_and_writes_meta() {
    let dir = TempDir::new().unwrap();
    let body = format!(
        r#"{ONE_SITE}, "group_elements": [{{"poles": [[4.0, 0.0]], "scale": -4.0}}, {{"poles": [[0.2, 0.1], [0.2, -0.1]], "scale": 0.05}}]}}"#
    );
    let cfg = write_config(&dir, "tau.json", &body);
    let out = dir.path().join("out");
    let o = run("tau", &cfg, &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&out.join("tau.json"));
    assert!(report["pass"].as_bool().unwrap());
    assert!(report["max_discrepancy"].as_f64().unwrap() < 1e-8);
    let meta = json(&out.join("tau.json.meta.json"));
    assert_eq!(meta["config_sha256"], hex::encode(Sha256::digest(body.as_bytes())));
    assert_eq!(meta["command"], "tau");
    assert_eq!(meta["tolerances"]["tau"], 1e-8);
}

#[test]
fn free_q_gives_unit_taus() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "free.json",
        r#"{"group_elements": [{"poles": [[4.0, 0.0]], "scale": -4.0}, {"poles": [[-0.2, 0.0]], "scale": 0.2}]}"#,
    );
    let out = dir.path().join("out");
    assert_eq!(run("tau", &cfg, &out).status.code(), Some(0));
    for e in json(&out.join("tau.json"))["entries"].as_array().unwrap() {
        let det = e["det"].as_array().unwrap();
        assert!((det[0].as_f64().unwrap() - 1.0).abs() < 1e-12 && det[1].as_f64().unwrap().abs() < 1e-12);
    }
}

#[test]
fn malformed_and_invalid_configs_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    for (name, body) in [
        ("syntax.json", "{\"q\": "),
        ("unknown.json", r#"{"lamda0": 2.5}"#),
        ("window.json", r#"{"flow": {"window": [-70, 8]}}"#),
        ("negative.json", r#"{"q": {"n_min": 0, "n_max": 0, "a": [-1.0], "b": [0.0]}}"#),
    ] {
        let o = run("evolve", &write_config(&dir, name, body), &out);
        assert_eq!(o.status.code(), Some(2), "{name}");
        let line = error_line(&o);
        assert_eq!(line["error"], "config");
        assert_eq!(line["exit_code"], 2);
    }
    let o = run("tau", &dir.path().join("missing.json"), &out);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn singular_sections_exit_3() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "long.json", &format!(r#"{ONE_SITE}, "flow": {{"times": [3.0], "window": [-4, 4]}}}}"#));
    let o = run("evolve", &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_line(&o)["error"], "numerical");
}

#[test]
fn verify_passes_on_one_site_data() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "v.json", &format!("{ONE_SITE}}}"));
    let out = dir.path().join("out");
    let o = run("verify", &cfg, &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&out.join("verify.json"));
    assert!(report["max_error"].as_f64().unwrap() <= 1e-6);
    assert!(report["first_failure"].is_null());
    assert!(out.join("verify.json.meta.json").exists());
}

#[test]
fn fault_injection_is_localized() {
    let dir = TempDir::new().unwrap();
    let body = format!(r#"{ONE_SITE}, "fault_injection": {{"t": 0.25, "n": 3, "delta": 1e-3}}}}"#);
    let out = dir.path().join("out");
    let o = run("verify", &write_config(&dir, "f.json", &body), &out);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(error_line(&o)["error"], "verification");
    let first = &json(&out.join("verify.json"))["first_failure"];
    assert!((first["t"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert_eq!(first["n"], 3);
}

#[test]
fn evolve_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "e.json", &format!(r#"{ONE_SITE}, "flow": {{"times": [0.0, 0.1, 0.2], "window": [-3, 3]}}}}"#));
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run("evolve", &cfg, &a).status.code(), Some(0));
    assert_eq!(run("evolve", &cfg, &b).status.code(), Some(0));
    let csv_a = std::fs::read(a.join("trajectory.csv")).unwrap();
    assert_eq!(csv_a, std::fs::read(b.join("trajectory.csv")).unwrap());
    let text = String::from_utf8(csv_a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,n,a_n,b_n"));
    assert_eq!(lines.count(), 3 * 7);
    assert!(a.join("trajectory.csv.meta.json").exists());
}

#[test]
fn free_trajectory_is_constant() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "free.json", r#"{"flow": {"times": [0.0, 0.3], "window": [-2, 2]}}"#);
    let out = dir.path().join("out");
    assert_eq!(run("evolve", &cfg, &out).status.code(), Some(0));
    let mut reader = csv::Reader::from_path(out.join("trajectory.csv")).unwrap();
    for row in reader.records() {
        let row = row.unwrap();
        let a: f64 = row[2].parse().unwrap();
        let b: f64 = row[3].parse().unwrap();
        assert!((a - 1.0).abs() < 1e-12 && b.abs() < 1e-12, "{row:?}");
    }
}

#[test]
fn weyl_routes_agree() {
    let dir = TempDir::new().unwrap();
    let body = format!(r#"{ONE_SITE}, "weyl_points": [[0.1, 0.2], [2.0, 1.0], [5.0, 0.5]]}}"#);
    let out = dir.path().join("out");
    let o = run("weyl", &write_config(&dir, "w.json", &body), &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&out.join("weyl.json"));
    assert!(report["certificate"]["herglotz"].as_bool().unwrap());
    let points = report["points"].as_array().unwrap();
    assert!(points[0]["m_symbol"].is_array() && points[2]["m_symbol"].is_array());
    // inside the annulus only the Weyl route has a value
    assert!(points[1]["m_symbol"].is_null());
    assert!(report["max_discrepancy"].as_f64().unwrap() < 1e-8);
}
