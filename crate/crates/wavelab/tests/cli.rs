//! End-to-end checks of the `wavelab` binary: exit codes, schemas and determinism.

use std::path::Path;
use std::process::{Command, Output};

const SCHEMA: &str = "# schema-version: 1";

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavelab")).args(args).env("WAVELAB_DATA_DIR", dir).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, data: &str, t_end: f64) -> String {
    let text = format!(
        r#"{{
  "model": {{"kind": "cubic_focusing"}},
  "grid": {{"n": 256, "r_max": 20.0}},
  "time": {{"dt": 1e-3, "t_end": {t_end}, "snapshot_stride": 100}},
  "data": {data},
  "seed": 7
}}"#
    );
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn zero_data_completes_with_zero_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "zero.json", r#"{"kind": "gaussian", "amplitude": 0.0, "width": 1.0}"#, 0.5);
    let out = run(dir.path(), &["evolve", "--config", &cfg, "--out", "zero"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let series = read(dir.path(), "zero_series.csv");
    let mut lines = series.lines();
    assert_eq!(lines.next(), Some(SCHEMA));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "t");
    let rows: Vec<Vec<f64>> =
        lines.filter(|l| !l.starts_with('#')).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 6);
    for row in &rows {
        assert!(row[1..].iter().all(|v| *v == 0.0), "{row:?}");
    }
    assert!(read(dir.path(), "zero_snap_00000.csv").starts_with(SCHEMA));
    assert!(dir.path().join("zero_config.json").exists());
}

#[test]
fn blowup_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let data = r#"{"kind": "ode_blowup", "T": 0.5, "radius": 8.0, "smoothing": 1.0}"#;
    let cfg = write_config(dir.path(), "phi.json", data, 2.0);
    let out = run(dir.path(), &["evolve", "--config", &cfg, "--out", "phi"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Blowup"));
    assert!(read(dir.path(), "phi_series.csv").starts_with(SCHEMA));
}

#[test]
fn errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["evolve"]).status.code(), Some(1));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"model": {"kind": "cubic_focusing"}, "extra": 1}"#).unwrap();
    assert_eq!(run(dir.path(), &["evolve", "--config", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn evolve_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "g.json", r#"{"kind": "gaussian", "amplitude": 0.5, "width": 1.0}"#, 0.5);
    for out in ["a", "b"] {
        assert_eq!(run(dir.path(), &["evolve", "--config", &cfg, "--out", out]).status.code(), Some(0));
    }
    for suffix in ["series.csv", "snap_00003.csv"] {
        assert_eq!(read(dir.path(), &format!("a_{suffix}")), read(dir.path(), &format!("b_{suffix}")));
    }
}

#[test]
fn empty_ensemble_is_an_error_with_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["channels", "--ensemble", "0", "--out", "e"]);
    assert_eq!(out.status.code(), Some(1));
    let csv = read(dir.path(), "e_channels.csv");
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with(SCHEMA));
}

#[test]
fn plane_data_radiate_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["channels", "--plane", "--ensemble", "3", "--out", "p"]);
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_str(&read(dir.path(), "p_channels_summary.json")).unwrap();
    assert!(summary["max_ext"].as_f64().unwrap() < 1e-8);
    assert!(read(dir.path(), "p_channels.csv").lines().any(|l| l.starts_with("# summary:")));
}

#[test]
fn ensemble_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["s1", "s2"] {
        let res = run(dir.path(), &["channels", "--ensemble", "5", "--seed", "11", "--out", out]);
        assert_eq!(res.status.code(), Some(0));
    }
    assert_eq!(read(dir.path(), "s1_channels.csv"), read(dir.path(), "s2_channels.csv"));
}

#[test]
fn stationary_profiles_and_slope_row() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["stationary", "--ell", "0", "--out", "z"]).status.code(), Some(0));
    let zero = read(dir.path(), "z_profile.csv");
    for line in zero.lines().skip(2).filter(|l| !l.starts_with('#')) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(v[1..].iter().all(|x| *x == 0.0), "{line}");
    }

    assert_eq!(run(dir.path(), &["stationary", "--ell", "1", "--out", "one"]).status.code(), Some(0));
    let prof = read(dir.path(), "one_profile.csv");
    let check = prof.lines().last().unwrap();
    assert!(check.starts_with("# slope_check:") && check.ends_with("ok=true"), "{check}");
    assert!(read(dir.path(), "one_phase.csv").starts_with(SCHEMA));
}

#[test]
fn kernel_samples_respect_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["kernel", "--k", "2", "--decay", "2", "--out", "k"]).status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_str(&read(dir.path(), "k_kernel.json")).unwrap();
    assert_eq!(summary["max_violation"].as_f64(), Some(0.0));
    let csv = read(dir.path(), "k_kernel.csv");
    assert!(csv.starts_with(SCHEMA) && csv.lines().count() > 3);
}
