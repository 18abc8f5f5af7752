//! End-to-end tests of the `warpcheck` binary: exit-code contract,
//! byte-level determinism of emitted artifacts, tolerance override, plotting.

use std::path::{Path, PathBuf};
use std::process::Command;

use assert_cmd::prelude::*;
use predicates::prelude::*;

fn bin() -> Command {
    Command::cargo_bin("warpcheck").expect("binary builds")
}

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

const PERTURBED_IDENTITIES: &str = r#"{
  "manifold": { "kind": "hyperbolic", "n": 2 },
  "surface": {
    "shape": { "type": "perturbed", "base": 1.2, "modes": [[2, 0.1]] },
    "grid": { "dim": "sphere", "n_mu": 16, "n_phi": 32 }
  },
  "task": "identities",
  "eps_list": [0.0, 0.5]
}"#;

#[test]
fn identities_on_centered_sphere_exit_zero() {
    let out = tempfile::tempdir().unwrap();
    bin()
        .args(["run"])
        .arg(repo_config("identities_sphere_h3.json"))
        .arg("--out")
        .arg(out.path())
        .assert()
        .success()
        .stdout(predicate::str::contains("overall: ok (exit 0)"));
    assert!(out.path().join("report.json").exists());
    assert!(out.path().join("summary.csv").exists());
    let summary = std::fs::read_to_string(out.path().join("summary.csv")).unwrap();
    for line in summary.lines().skip(1) {
        assert!(line.ends_with("identity_ok"), "unexpected verdict: {line}");
    }
}

#[test]
fn identical_config_produces_byte_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), PERTURBED_IDENTITIES);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        bin()
            .args(["run"])
            .arg(&config)
            .arg("--out")
            .arg(out)
            .assert()
            .success();
    }
    for file in ["report.json", "summary.csv"] {
        let x = std::fs::read(a.join(file)).unwrap();
        let y = std::fs::read(b.join(file)).unwrap();
        assert_eq!(x, y, "{file} differs between identical runs");
    }
}

#[test]
fn thread_count_does_not_change_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), PERTURBED_IDENTITIES);
    let (a, b) = (dir.path().join("t1"), dir.path().join("t4"));
    for (out, threads) in [(&a, "1"), (&b, "4")] {
        bin()
            .args(["run"])
            .arg(&config)
            .arg("--out")
            .arg(out)
            .args(["--threads", threads])
            .assert()
            .success();
    }
    let x = std::fs::read(a.join("summary.csv")).unwrap();
    let y = std::fs::read(b.join("summary.csv")).unwrap();
    assert_eq!(x, y, "summary.csv depends on the thread count");
}

#[test]
fn assumption_violation_exits_one() {
    let out = tempfile::tempdir().unwrap();
    bin()
        .args(["run"])
        .arg(repo_config("hk_sweep_violation.json"))
        .arg("--out")
        .arg(out.path())
        .assert()
        .code(1)
        .stderr(predicate::str::contains("ASSUMPTION_VIOLATED"));
}

#[test]
fn invalid_config_exits_one_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{
          "manifold": { "kind": "hyperbolic", "n": 2 },
          "task": "hk-sweep",
          "eps_list": []
        }"#,
    );
    bin()
        .args(["run"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("out"))
        .assert()
        .code(1)
        .stderr(predicate::str::contains("CONFIG_INVALID").and(predicate::str::contains("eps_list")));
}

#[test]
fn umbilic_deficit_is_inconclusive_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{
          "manifold": { "kind": "hyperbolic", "n": 2 },
          "surface": {
            "shape": { "type": "sphere", "radius": 1.0, "offset": 0.0 },
            "grid": { "dim": "sphere", "n_mu": 16, "n_phi": 32 }
          },
          "task": "hk-sweep",
          "eps_list": [0.0]
        }"#,
    );
    // The deficit vanishes on a geodesic sphere, so a strict-inequality
    // claim lands inside the quadrature dead-band.
    bin()
        .args(["run"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("out"))
        .assert()
        .code(3)
        .stdout(predicate::str::contains("overall: inconclusive (exit 3)"));
}

#[test]
fn env_tolerance_override_flips_verdict_to_violated() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{
          "manifold": { "kind": "hyperbolic", "n": 2 },
          "surface": {
            "shape": { "type": "perturbed", "base": 1.2, "modes": [[2, 0.1]] },
            "grid": { "dim": "sphere", "n_mu": 16, "n_phi": 32 }
          },
          "task": "geometry"
        }"#,
    );
    bin()
        .args(["run"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("default"))
        .assert()
        .success();
    bin()
        .args(["run"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("tight"))
        .env("WARPCHECK_TOL", "1e-15")
        .assert()
        .code(2)
        .stdout(predicate::str::contains("overall: violated (exit 2)"));
}

#[test]
fn plot_emits_long_format_series() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{
          "manifold": { "kind": "hyperbolic", "n": 1 },
          "surface": {
            "shape": { "type": "perturbed", "base": 1.2, "modes": [[2, 0.08]] },
            "grid": { "dim": "circle", "n_theta": 64 }
          },
          "task": "flow",
          "flow": {
            "speed": { "kind": "unit_inward" },
            "t_end": 0.02,
            "dt": 0.005,
            "snapshot_every": 1
          }
        }"#,
    );
    let out = dir.path().join("out");
    bin()
        .args(["run"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .assert()
        .success();
    assert!(out.join("trace.csv").exists());
    let assert = bin()
        .args(["plot"])
        .arg(out.join("report.json"))
        .args(["--series", "q_vs_t"])
        .assert()
        .success();
    let stdout = String::from_utf8(assert.get_output().stdout.clone()).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "series,x,y");
    assert_eq!(lines.len(), 6, "one row per recorded time: {stdout}");
    assert!(lines[1].starts_with("q_vs_t,0.000000000000e0,"));

    bin()
        .args(["plot"])
        .arg(out.join("report.json"))
        .args(["--series", "substatic"])
        .assert()
        .code(1)
        .stderr(predicate::str::contains("no 'substatic' series"));
}

#[test]
fn substatic_scan_series_matches_closed_form() {
    let out = tempfile::tempdir().unwrap();
    bin()
        .args(["run"])
        .arg(repo_config("substatic_scan_cosh.json"))
        .arg("--out")
        .arg(out.path())
        .assert()
        .success();
    let assert = bin()
        .args(["plot"])
        .arg(out.path().join("report.json"))
        .args(["--series", "substatic"])
        .assert()
        .success();
    let stdout = String::from_utf8(assert.get_output().stdout.clone()).unwrap();
    // lambda = cosh over a unit round 2-sphere fiber: scalar = 2 sinh r.
    for line in stdout.lines().skip(1) {
        let mut parts = line.split(',');
        assert_eq!(parts.next(), Some("substatic"));
        let r: f64 = parts.next().unwrap().parse().unwrap();
        let y: f64 = parts.next().unwrap().parse().unwrap();
        assert!((y - 2.0 * r.sinh()).abs() < 1e-10, "at r = {r}: {y}");
    }
}
