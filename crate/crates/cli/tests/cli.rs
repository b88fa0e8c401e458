use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_atomnav"))
}

fn chain_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/chains")
        .join(name)
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn atomnav")
}

fn write_config(dir: &Path, json: &str) -> PathBuf {
    let p = dir.join("scenario.json");
    fs::write(&p, json).unwrap();
    p
}

fn summary(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("out").join(name)).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn fringe_default_starts_at_bright_port_and_spans_thirty_radians() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["fringe", "--out", "out"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = csv_rows(&dir.path().join("out/fringe_scan.csv"));
    assert_eq!(rows.len(), 32);
    let phase0: f64 = rows[0][0].parse().unwrap();
    let pop0: f64 = rows[0][1].parse().unwrap();
    assert_eq!(phase0, 0.0);
    // p = 1 at zero phase; allow five binomial sigmas at the nearest resolvable p.
    let n = 1e6_f64;
    assert!((pop0 - 1.0).abs() <= 5.0 / n.sqrt(), "population {pop0}");
    let last: f64 = rows.last().unwrap()[0].parse().unwrap();
    assert_eq!(last - phase0, 30.0);
    let s = summary(dir.path(), "fringe_summary.json");
    assert_eq!(s["commanded_phase_span_rad"].as_f64().unwrap(), 30.0);
    assert_eq!(s["scenario"]["scan"]["points"], 32);
}

#[test]
fn fringe_without_scan_block_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), r#"{"interferometer": {"v_z_mps": 15.0}}"#);
    let out = run_in(dir.path(), &["fringe", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`scan`"));
}

#[test]
fn config_errors_and_io_errors_have_distinct_codes() {
    let dir = TempDir::new().unwrap();
    let typo = write_config(dir.path(), r#"{"scan": {"pointz": 8}}"#);
    let out = run_in(dir.path(), &["fringe", "--config", typo.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run_in(dir.path(), &["fringe", "--config", "does/not/exist.json"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run_in(dir.path(), &["chain", "does/not/exist.fc"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn defaults_are_reported_when_applied() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scan": {"points": 16}, "output": {"dir": "out"}}"#,
    );
    let out = run_in(dir.path(), &["fringe", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("default applied: scan.seed"));
    assert!(!err.contains("scan.points"));
    let s = summary(dir.path(), "fringe_summary.json");
    assert_eq!(s["scenario"]["scan"]["seed"], 1);
    assert_eq!(s["scenario"]["interferometer"]["v_z_mps"], 15.0);
}

#[test]
fn chain_cooling_passes() {
    let out = bin()
        .arg("chain")
        .arg(chain_file("cooling_chain.fc"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let reports: Value = serde_json::from_slice(&out.stdout).unwrap();
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 5);
    assert!(reports.iter().all(|r| r["pass"] == true));
}

fn edited_cooling_chain(dir: &Path, vco_line: &str) -> (PathBuf, usize) {
    let text = fs::read_to_string(chain_file("cooling_chain.fc")).unwrap();
    let line_no = text.lines().position(|l| l.starts_with("vco")).unwrap() + 1;
    let edited: Vec<&str> = text
        .lines()
        .map(|l| if l.starts_with("vco") { vco_line } else { l })
        .collect();
    let p = dir.join("edited.fc");
    fs::write(&p, edited.join("\n")).unwrap();
    (p, line_no)
}

#[test]
fn chain_corrupted_vco_reports_line() {
    let dir = TempDir::new().unwrap();
    let (p, line) = edited_cooling_chain(dir.path(), "vco      vco      152QHz");
    let out = bin().arg("chain").arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(&format!("line {line}")), "{err}");
}

#[test]
fn chain_detuned_vco_fails_checks() {
    let dir = TempDir::new().unwrap();
    let (p, _) = edited_cooling_chain(dir.path(), "vco      vco      150MHz");
    let out = bin().arg("chain").arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let reports: Value = serde_json::from_slice(&out.stdout).unwrap();
    let div16 = reports
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["id"] == "div16")
        .unwrap();
    assert_eq!(div16["pass"], false);
    // |160 MHz − 150 MHz| / 16
    assert_eq!(div16["nearest_hz"].as_f64().unwrap(), 625_000.0);
}

#[test]
fn lockin_demo_recovers_s1_and_locks() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["lockin", "--out", "out", "--json"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let s: Value = serde_json::from_slice(&out.stdout).unwrap();
    let est = s["demodulation"]["s1_estimate"].as_f64().unwrap();
    assert!((est - 0.3).abs() < 1e-9, "{est}");
    assert_eq!(s["servo"]["converged"], true);
    assert_eq!(s["scenario"]["lockin"]["initial_offset_hz"], 1e6);
}

#[test]
fn lockin_above_nyquist_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"lockin": {"mode": "demod", "ref_freq_hz": 6e6, "sample_rate_hz": 10e6}}"#,
    );
    let out = run_in(
        dir.path(),
        &["lockin", "--config", cfg.to_str().unwrap(), "--out", "out"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lockin_unstable_gain_is_a_check_failure() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), r#"{"lockin": {"mode": "servo", "gain": 2.5}}"#);
    let out = run_in(
        dir.path(),
        &["lockin", "--config", cfg.to_str().unwrap(), "--out", "out"],
    );
    assert_eq!(out.status.code(), Some(3));
    let s = summary(dir.path(), "lockin_summary.json");
    assert_eq!(s["servo"]["outcome"]["status"], "unstable");
}

#[test]
fn align_gate() {
    let dir = TempDir::new().unwrap();
    let at_bound = write_config(
        dir.path(),
        r#"{"alignment": {"tilt_rad": 312e-6, "safety_factor": 1.0}}"#,
    );
    let out = run_in(
        dir.path(),
        &[
            "align",
            "--config",
            at_bound.to_str().unwrap(),
            "--out",
            "out",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let margin = write_config(
        dir.path(),
        r#"{"alignment": {"tilt_rad": 312e-6, "safety_factor": 10.0}}"#,
    );
    let out = run_in(
        dir.path(),
        &[
            "align",
            "--config",
            margin.to_str().unwrap(),
            "--out",
            "out",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    let s = summary(dir.path(), "alignment_report.json");
    let bound = s["report"]["max_tilt_rad"].as_f64().unwrap();
    assert!((bound - 312e-6).abs() / 312e-6 < 0.01);
}

fn navigate_summary(dir: &Path, config: &str, seed: u64) -> Value {
    let cfg = write_config(dir, config);
    let out = run_in(
        dir,
        &[
            "navigate",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            &seed.to_string(),
            "--json",
            "--out",
            "out",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn navigate_zero_motion_stays_within_noise_bound() {
    let dir = TempDir::new().unwrap();
    let s = navigate_summary(
        dir.path(),
        r#"{"scan": {}, "navigation": {"dt_s": 0.01, "duration_s": 10.0, "noise": true}}"#,
        5,
    );
    let err = s["final_position_error_magnitude_m"].as_f64().unwrap();
    let sigma = s["predicted_position_sigma_m"].as_f64().unwrap();
    assert!(sigma > 0.0);
    assert!(err < 5.0 * sigma, "error {err} vs sigma {sigma}");
}

#[test]
fn navigate_constant_acceleration_without_noise() {
    let dir = TempDir::new().unwrap();
    let s = navigate_summary(
        dir.path(),
        r#"{"truth": {"accel_mps2": 0.1, "rot_radps": 0.0}, "scan": {},
            "navigation": {"dt_s": 0.01, "duration_s": 10.0, "noise": false}}"#,
        1,
    );
    let x = s["final_position_m"][0].as_f64().unwrap();
    // ½·0.1·10²
    assert!((x - 5.0).abs() / 5.0 < 1e-6, "x = {x}");
    let rows = csv_rows(&dir.path().join("out/trajectory.csv"));
    assert_eq!(rows.len(), 1001);
}

#[test]
fn navigate_scatter_matches_prediction() {
    let dir = TempDir::new().unwrap();
    let config = r#"{"truth": {"accel_mps2": 0.05, "rot_radps": 0.0}, "scan": {"points": 16},
                     "navigation": {"dt_s": 0.02, "duration_s": 2.0, "noise": true}}"#;
    let mut errors = Vec::new();
    let mut sigma = 0.0;
    for seed in 0..30 {
        let s = navigate_summary(dir.path(), config, 1000 + seed);
        errors.push(s["final_position_error_m"][0].as_f64().unwrap());
        sigma = s["predicted_position_sigma_m"].as_f64().unwrap();
    }
    let n = errors.len() as f64;
    let mean = errors.iter().sum::<f64>() / n;
    let sd = (errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let ratio = sd / sigma;
    assert!(
        (0.5..=2.0).contains(&ratio),
        "scatter {sd} vs predicted {sigma}"
    );
}
