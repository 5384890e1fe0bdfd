//! End-to-end tests of the `wlab` binary: exit codes, output files, the run
//! manifest, configuration precedence, and bit-for-bit reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wlab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn read_json(path: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    serde_json::from_str(&text).expect("valid JSON")
}

#[test]
fn constants_agree_and_manifest_describes_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["constants", "--out-dir", "res"]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let report = read_json(&dir.path().join("res/constants.json"));
    assert_eq!(report["agree"], true);
    assert!(report["gap"].as_f64().unwrap() < 2e-7);

    let manifest = read_json(&dir.path().join("res/manifest.json"));
    assert_eq!(manifest["command"], "constants");
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    let hash = manifest["config_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert!(hash.chars().all(|c| c.is_ascii_hexdigit()));
    assert_eq!(manifest["outputs"], serde_json::json!(["constants.json"]));
    assert!(manifest["prime_square_constant"]["value"].as_f64().unwrap() > 0.45);
    assert_eq!(manifest["seed"], 0);
}

#[test]
fn wvalues_starts_at_the_trivial_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["wvalues", "--n-max", "50", "--out-dir", "res"]);
    assert_eq!(code(&out), 0);

    let csv = std::fs::read_to_string(dir.path().join("res/wvalues.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,lambda,omega,theta,w_re,w_im,w_lambda_re,w_lambda_im");
    assert_eq!(lines[1], "1,1,0,0,1,0,1,0");
    assert_eq!(lines.len(), 51);
}

#[test]
fn density_converges_and_verifier_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "density", "--x", "1.0", "--epsilon", "1e-3", "--budget", "200000",
            "--witness-parity", "-1", "--out-dir", "res",
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let report = read_json(&dir.path().join("res/density.json"));
    assert_eq!(report["status"], "converged");
    assert_eq!(report["verification"]["ok"], true);
    assert!(report["error"].as_f64().unwrap() < 1e-3);
    let witness = &report["witness"];
    assert_eq!(witness["parity"], -1);
    assert!(witness["scaled_prime_count"].as_u64().unwrap() > 0);
    assert!(witness["theta_error_bound"].as_f64().unwrap() < 1e-9);
}

#[test]
fn density_budget_exhaustion_is_a_finding_not_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["density", "--x", "1.0", "--epsilon", "1e-9", "--budget", "200", "--out-dir", "res"],
    );
    assert_eq!(code(&out), 3);

    // Outputs are still written on a finding.
    let report = read_json(&dir.path().join("res/density.json"));
    assert_eq!(report["status"], "budget-exhausted");
    let manifest = read_json(&dir.path().join("res/manifest.json"));
    assert!(manifest["finding"].as_str().unwrap().contains("budget"));
}

#[test]
fn invalid_target_is_rejected_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["density", "--x", "5.0", "--out-dir", "res"]);
    assert_eq!(code(&out), 2);
    assert!(!dir.path().join("res/density.json").exists());
}

#[test]
fn sector_reports_both_parity_copies() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["sector", "--x", "0.2", "--y", "0.8", "--n-max", "20000", "--out-dir", "res"],
    );
    assert_eq!(code(&out), 0);

    let report = read_json(&dir.path().join("res/sector.json"));
    let a = report["count_a"].as_u64().unwrap();
    let b = report["count_b"].as_u64().unwrap();
    assert!(a > 0 && b > 0);
    assert!((report["delta_a"].as_f64().unwrap() - a as f64 / 20000.0).abs() < 1e-12);
    // The two parity copies should already be close at this height.
    assert!(report["delta_gap"].as_f64().unwrap() < 0.05);
}

#[test]
fn lambda_level_cannot_define_a_sector() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["sector", "--x", "0.2", "--y", "0.8", "--level", "lambda", "--out-dir", "res"],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn series_tracks_the_closed_form_and_euler_product() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "series", "--sigma", "2", "--n-max", "20000",
            "--euler-cutoff", "2000", "--out-dir", "res",
        ],
    );
    assert_eq!(code(&out), 0);

    let report = read_json(&dir.path().join("res/series.json"));
    assert!(report["reference"]["gap_to_partial"].as_f64().unwrap() < 1e-4);
    assert!(report["euler_product"]["gap_to_partial"].as_f64().unwrap() < 1e-2);
}

#[test]
fn growth_writes_checkpoints_and_a_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["growth", "--n-max", "50000", "--out-dir", "res"]);
    assert_eq!(code(&out), 0);

    let report = read_json(&dir.path().join("res/growth.json"));
    let checkpoints = report["checkpoints"].as_u64().unwrap();
    let alpha = report["fit"]["alpha"].as_f64().unwrap();
    assert!(alpha > 0.0 && alpha < 1.0);

    let csv = std::fs::read_to_string(dir.path().join("res/growth.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len() as u64, checkpoints + 1);
    assert_eq!(lines[0], "n,sum_re,sum_im,modulus");
    assert!(lines[1].contains('e'), "full-precision scientific notation");
    let last = lines.last().unwrap();
    assert!(last.starts_with("50000,"));
}

#[test]
fn grid_shape_follows_the_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["grid", "--alpha", "0.6", "--n-max", "10000", "--out-dir", "res"],
    );
    assert_eq!(code(&out), 0);

    // 10000^0.6 = 251.19 and 10000^0.4 = 39.81; the remainder 211 stays
    // below the row count, so the column count is not rounded up.
    let report = read_json(&dir.path().join("res/grid.json"));
    assert_eq!(report["rows"], 251);
    assert_eq!(report["cols"], 39);
    assert_eq!(report["residual"], 10000 - 251 * 39);
    assert_eq!(
        report["column_moduli"].as_array().unwrap().len(),
        39
    );
}

#[test]
fn small_scan_finds_no_angle_collisions() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["inject", "--n-max", "3000", "--out-dir", "res"]);
    assert_eq!(code(&out), 0);

    let report = read_json(&dir.path().join("res/inject.json"));
    assert_eq!(report["scanned"], 3000);
    assert_eq!(report["injective"], true);
}

#[test]
fn cache_lifecycle_build_load_list_clear() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cc");
    let cache_str = cache.to_str().unwrap();

    let out = run(
        dir.path(),
        &["cache", "build", "--limit", "20000", "--cache-dir", cache_str, "--out-dir", "r1"],
    );
    assert_eq!(code(&out), 0);
    let report = read_json(&dir.path().join("r1/cache.json"));
    assert_eq!(report["already_cached"], false);
    assert!(report["bytes"].as_u64().unwrap() > 0);

    let out = run(
        dir.path(),
        &["cache", "build", "--limit", "20000", "--cache-dir", cache_str, "--out-dir", "r2"],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(read_json(&dir.path().join("r2/cache.json"))["already_cached"], true);

    let out = run(
        dir.path(),
        &["cache", "list", "--cache-dir", cache_str, "--out-dir", "r3"],
    );
    assert_eq!(code(&out), 0);
    let entries = read_json(&dir.path().join("r3/cache.json"));
    assert_eq!(entries["entries"][0]["limit"], 20000);

    let out = run(
        dir.path(),
        &["cache", "clear", "--cache-dir", cache_str, "--out-dir", "r4"],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(read_json(&dir.path().join("r4/cache.json"))["removed"], 1);
}

#[test]
fn corrupt_cache_is_an_io_error_not_a_silent_rebuild() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cc");
    let cache_str = cache.to_str().unwrap();

    let out = run(
        dir.path(),
        &["cache", "build", "--limit", "20000", "--cache-dir", cache_str, "--out-dir", "r1"],
    );
    assert_eq!(code(&out), 0);

    // Truncate the cached table, then try to use it.
    let file = cache.join("spf-20000.sieve");
    let bytes = std::fs::read(&file).unwrap();
    std::fs::write(&file, &bytes[..bytes.len() / 2]).unwrap();

    let out = run(
        dir.path(),
        &["wvalues", "--n-max", "20000", "--cache-dir", cache_str, "--out-dir", "r2"],
    );
    assert_eq!(code(&out), 4, "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn cache_command_requires_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["cache", "list", "--out-dir", "res"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("lab.json"), r#"{ "n_max": 30 }"#).unwrap();

    let out = run(
        dir.path(),
        &["wvalues", "--config", "lab.json", "--out-dir", "r1"],
    );
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(dir.path().join("r1/wvalues.csv")).unwrap();
    assert_eq!(csv.lines().count(), 31);

    let out = run(
        dir.path(),
        &["wvalues", "--config", "lab.json", "--n-max", "10", "--out-dir", "r2"],
    );
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(dir.path().join("r2/wvalues.csv")).unwrap();
    assert_eq!(csv.lines().count(), 11);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("lab.json"), r#"{ "nmax": 30 }"#).unwrap();
    let out = run(
        dir.path(),
        &["wvalues", "--config", "lab.json", "--out-dir", "r1"],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn reruns_are_bit_for_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["series", "--sigma", "1.5", "--t", "2.0", "--n-max", "10000"];
    let out = run(dir.path(), &[&args[..], &["--out-dir", "r1"]].concat());
    assert_eq!(code(&out), 0);
    let out = run(dir.path(), &[&args[..], &["--out-dir", "r2"]].concat());
    assert_eq!(code(&out), 0);

    let a = std::fs::read(dir.path().join("r1/series.json")).unwrap();
    let b = std::fs::read(dir.path().join("r2/series.json")).unwrap();
    assert_eq!(a, b);

    let ha = read_json(&dir.path().join("r1/manifest.json"))["config_hash"].clone();
    let hb = read_json(&dir.path().join("r2/manifest.json"))["config_hash"].clone();
    assert_eq!(ha, hb);
}

#[test]
fn seed_is_recorded_and_part_of_the_run_identity() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["inject", "--n-max", "1000", "--seed", "7", "--out-dir", "r1"],
    );
    assert_eq!(code(&out), 0);
    let m1 = read_json(&dir.path().join("r1/manifest.json"));
    assert_eq!(m1["seed"], 7);

    let out = run(dir.path(), &["inject", "--n-max", "1000", "--out-dir", "r2"]);
    assert_eq!(code(&out), 0);
    let m2 = read_json(&dir.path().join("r2/manifest.json"));
    assert_ne!(m1["config_hash"], m2["config_hash"]);
}

#[test]
fn bad_level_text_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["wvalues", "--level", "sideways", "--out-dir", "r1"],
    );
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("level"));
}
