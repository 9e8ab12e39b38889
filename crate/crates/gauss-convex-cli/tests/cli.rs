//! End-to-end tests of the binary: exit codes, output determinism, and the
//! body-spec surface.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gauss-convex"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_spec(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn influence_on_builtin_slab() {
    let out = run(&[
        "influence", "--body", "slab", "--dim", "3", "--seed", "7", "--samples", "65536",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# gauss-convex v"));
    let row = text
        .lines()
        .find(|l| l.starts_with("influence[e1]"))
        .expect("e1 row");
    let fields: Vec<&str> = row.split(',').collect();
    let value: f64 = fields[2].parse().unwrap();
    let se: f64 = fields[3].parse().unwrap();
    assert!((value - 0.342_198_280_312_216_5).abs() <= 4.0 * se);
    assert!(se > 0.0);
}

#[test]
fn influence_on_builtin_ball_total() {
    let out = run(&[
        "influence", "--body", "ball", "--dim", "2", "--r", "1.41421356", "--seed", "3",
        "--samples", "1048576",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text
        .lines()
        .find(|l| l.starts_with("total_influence"))
        .expect("total row");
    let fields: Vec<&str> = row.split(',').collect();
    let value: f64 = fields[2].parse().unwrap();
    let se: f64 = fields[3].parse().unwrap();
    assert!((value - 0.520_260_095_022_888_9).abs() <= 4.0 * se.max(1e-6));
}

#[test]
fn missing_body_flag_is_usage_error() {
    let out = run(&["influence", "--dim", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.to_lowercase().contains("usage") || err.contains("--body"));
}

#[test]
fn malformed_spec_reports_location_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "broken.json", "{\"kind\": \"slab\", \"v\": [1, 0]");
    let out = run(&["influence", "--body", &spec, "--seed", "1", "--samples", "1024"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line"), "stderr: {err}");
    assert!(err.contains("column"), "stderr: {err}");
}

#[test]
fn invalid_numeric_flag_exits_2() {
    let out = run(&[
        "influence", "--body", "slab", "--dim", "3", "--samples", "-4",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spec_file_round_trip_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "slab.json",
        r#"{ "kind": "slab", "v": [1.0, 0.0, 0.0], "c": 1.0 }"#,
    );
    let from_file = run(&[
        "influence", "--body", &spec, "--seed", "5", "--samples", "32768",
    ]);
    let from_builtin = run(&[
        "influence", "--body", "slab", "--dim", "3", "--c", "1.0", "--seed", "5", "--samples",
        "32768",
    ]);
    assert!(from_file.status.success());
    // Identical bodies and seeds produce identical estimates.
    assert_eq!(from_file.stdout, from_builtin.stdout);
}

#[test]
fn verify_subset_exits_zero_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for (path, workers) in [(&out_a, "1"), (&out_b, "4")] {
        let out = run(&[
            "verify",
            "--suite",
            "builtin",
            "--checks",
            "poincare",
            "--seed",
            "7",
            "--samples",
            "16384",
            "--workers",
            workers,
            "--skip-thresholds",
            "--skip-friedgut",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_eq!(a, b, "reports must be byte-identical across worker counts");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# gauss-convex v"));
    assert!(text.lines().skip(2).all(|l| l.contains("pass")));
}

#[test]
fn verify_requires_seed() {
    let out = bin()
        .args(["verify", "--suite", "builtin"])
        .env_remove("GAUSS_CONVEX_SEED")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_seed_from_environment() {
    let out = bin()
        .args([
            "verify",
            "--suite",
            "builtin",
            "--checks",
            "isoperimetric",
            "--samples",
            "4096",
            "--skip-thresholds",
            "--skip-friedgut",
        ])
        .env("GAUSS_CONVEX_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn threshold_curve_file_has_width_column() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("curve.csv");
    let out = run(&[
        "threshold", "--body", "cube", "--dim", "8", "--r", "1.0", "--eps", "0.1", "--grid",
        "0.3:3.0:64", "--seed", "7", "--samples", "16384", "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let rows: Vec<&str> = text.lines().skip(3).collect();
    assert_eq!(rows.len(), 64);
    // Width column is present and constant.
    let widths: Vec<&str> = rows
        .iter()
        .map(|r| r.split(',').nth(3).unwrap())
        .collect();
    assert!(widths.iter().all(|w| *w == widths[0]));
    let w: f64 = widths[0].parse().expect("bracketed width");
    assert!(w > 0.0 && w < 3.0);
}

#[test]
fn threshold_unbracketed_with_strict_exits_3() {
    let out = run(&[
        "threshold", "--body", "slab", "--dim", "2", "--eps", "0.1", "--grid", "0.1:0.2:4",
        "--seed", "7", "--samples", "4096", "--strict",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn shell_density_rows() {
    let out = run(&[
        "shell", "--body", "ball", "--dim", "3", "--r", "2.0", "--radii", "1.0:3.0:5", "--seed",
        "7", "--samples", "8192",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(3).collect();
    assert_eq!(rows.len(), 5);
    // Inside radius 1: alpha = 1; outside radius 3: alpha = 0.
    assert!(rows[0].starts_with("1,1,0"));
    assert!(rows[4].starts_with("3,0,0"));
}

#[test]
fn friedgut_two_slab_trace() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "cross.json",
        r#"{ "kind": "intersect", "parts": [
            { "kind": "slab", "v": [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], "c": 1.0 },
            { "kind": "slab", "v": [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], "c": 1.0 }
        ] }"#,
    );
    let out = run(&[
        "friedgut", "--body", &spec, "--eps", "0.01", "--seed", "7", "--samples", "131072",
        "--outer", "8192", "--inner", "256",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let steps = text.lines().skip(3).count();
    assert_eq!(steps, 2, "expected a 2-step trace:\n{text}");
}

#[test]
fn json_format_mirrors_csv_content() {
    let out = run(&[
        "influence", "--body", "cube", "--dim", "2", "--r", "1.0", "--seed", "9", "--samples",
        "8192", "--format", "json",
    ]);
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["kind"], "influence");
    assert_eq!(parsed["seed"], 9);
    // dim influences + total + max direction + volume.
    assert_eq!(parsed["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn matrix_flag_emits_second_moments() {
    let out = run(&[
        "influence", "--body", "cube", "--dim", "2", "--r", "1.0", "--seed", "9", "--samples",
        "65536", "--matrix",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let entries: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("\"second_moment"))
        .collect();
    assert_eq!(entries.len(), 3, "upper triangle of a 2x2 matrix:\n{text}");
    // Off-diagonal entry of the cube vanishes.
    let off = entries
        .iter()
        .find(|l| l.contains("e1,e2"))
        .expect("off-diagonal row");
    // Layout after the quoted quantity: ,<direction=empty>,<value>,<se>,...
    let fields: Vec<&str> = off.split("\",").nth(1).unwrap().split(',').collect();
    let value: f64 = fields[1].parse().unwrap();
    let se: f64 = fields[2].parse().unwrap();
    assert!(value.abs() <= 4.0 * se, "off-diagonal {value} ± {se}");
}

#[test]
fn rotate_spec_builds_and_runs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "rot.json",
        r#"{ "kind": "rotate", "angle_deg": 45.0, "plane": [1, 2],
             "child": { "kind": "slab", "v": [1.0, 0.0], "c": 1.0 } }"#,
    );
    let out = run(&[
        "influence", "--body", &spec, "--seed", "3", "--samples", "65536",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // The max-influence direction of the rotated slab is the diagonal.
    let row = text
        .lines()
        .find(|l| l.starts_with("max_influence"))
        .unwrap();
    let direction = row.split(',').nth(1).unwrap();
    let comps: Vec<f64> = direction
        .split(' ')
        .map(|s| s.parse().unwrap())
        .collect();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let align = (comps[0] * s + comps[1] * s).abs();
    assert!(align > 0.999, "direction {comps:?}");
}
