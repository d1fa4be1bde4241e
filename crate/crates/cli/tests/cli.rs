//! Command-line behavior: config files, flag precedence, exit codes, and
//! output surface checks.

use std::path::Path;
use std::process::Command;

fn ptsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ptsim"))
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {path:?}: {e}"))
}

#[test]
fn evolve_headers_and_footer() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let status = ptsim()
        .args(["evolve", "--gamma-khz", "47", "--n-samples", "64", "--output"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let lossy = read(&dir.path().join("run_lossy.csv"));
    let pt = read(&dir.path().join("run_pt.csv"));
    for text in [&lossy, &pt] {
        assert!(text.contains("t_us,rho00,rho11,rho22,re_rho01,im_rho01,trace,sigma_z_norm,sigma_y_norm"));
        assert!(text.contains("# max_abs_diff_numeric_vs_reference"));
    }
    // 2-level runs leave the rho22 column empty.
    let first_row = lossy.lines().find(|l| !l.starts_with('#') && l.contains(',')).unwrap();
    let second_row = lossy
        .lines()
        .filter(|l| !l.starts_with('#'))
        .nth(1)
        .unwrap();
    assert!(first_row.starts_with("t_us"));
    let fields: Vec<&str> = second_row.split(',').collect();
    assert_eq!(fields.len(), 9);
    assert_eq!(fields[3], "");
}

#[test]
fn evolve_three_level_fills_rho22_and_refuses_pt() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run3.csv");
    let status = ptsim()
        .args([
            "evolve", "--gamma-khz", "20", "--levels", "3", "--picture", "lossy", "--n-samples",
            "32", "--output",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = read(&dir.path().join("run3_lossy.csv"));
    let last = text.lines().rev().find(|l| !l.starts_with('#')).unwrap();
    let fields: Vec<&str> = last.split(',').collect();
    let rho22: f64 = fields[3].parse().unwrap();
    assert!(rho22 > 0.5, "population should have leaked into |2>, got {rho22}");

    // PT picture with 3 levels is a configuration error (exit 2).
    let status = ptsim()
        .args(["evolve", "--levels", "3", "--picture", "pt", "--output"])
        .arg(dir.path().join("bad.csv"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    let out = dir.path().join("from_conf.csv");
    std::fs::write(
        &conf,
        format!(
            "# reference run\nomega_khz = 32\ngamma_khz = 5 # PTS\nt_max_us = 20\nn_samples = 16\noutput = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let status = ptsim().args(["evolve", "--config"]).arg(&conf).status().unwrap();
    assert!(status.success());
    let text = read(&dir.path().join("from_conf_lossy.csv"));
    assert!(text.contains("# gamma_khz = 5"));

    // An explicit flag overrides the file.
    let status = ptsim()
        .args(["evolve", "--gamma-khz", "9", "--config"])
        .arg(&conf)
        .status()
        .unwrap();
    assert!(status.success());
    let text = read(&dir.path().join("from_conf_lossy.csv"));
    assert!(text.contains("# gamma_khz = 9"));
}

#[test]
fn unknown_config_key_rejected_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    std::fs::write(&conf, "omega_khz = 32\n\nfrobnicate = 7\n").unwrap();
    let output = ptsim().args(["evolve", "--config"]).arg(&conf).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line 3"), "stderr was: {stderr}");
    assert!(stderr.contains("frobnicate"));
}

#[test]
fn bad_flag_value_exits_two() {
    let status = ptsim().args(["spectrum", "--gamma-grid", "5:1:10"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let status = ptsim().args(["evolve", "--picture", "sideways"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn numerical_domain_error_exits_three() {
    // γt ≈ 886 at the horizon: the state underflows to numerical zero and
    // the PT picture would overflow, a numerical-domain failure.
    let dir = tempfile::tempdir().unwrap();
    let status = ptsim()
        .args([
            "evolve",
            "--gamma-khz",
            "47",
            "--t-max-us",
            "3000",
            "--picture",
            "pt",
            "--n-samples",
            "8",
            "--output",
        ])
        .arg(dir.path().join("x.csv"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn io_error_exits_four() {
    let status = ptsim()
        .args(["spectrum", "--output", "/nonexistent-dir/deep/x.csv"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(4));
}

#[test]
fn experiment_noiseless_sentinel_recovers_gamma() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("exp.csv");
    let output = ptsim()
        .args(["experiment", "--gamma-khz", "10", "--n-shots", "0", "--output"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.starts_with("gamma_hat_khz = "), "stdout: {stdout}");
    let fit = read(&dir.path().join("exp_ptseries.csv"));
    let line = fit.lines().find(|l| l.starts_with("# gamma_hat_khz")).unwrap();
    let value: f64 = line.split('=').nth(1).unwrap().trim().parse().unwrap();
    assert!((value - 10.0).abs() / 10.0 < 1e-4, "gamma_hat_khz = {value}");
    // Shots CSV records the sentinel and the PRNG id.
    let shots = read(&dir.path().join("exp_shots.csv"));
    assert!(shots.contains("# prng = chacha8-stream-per-point-v1"));
    assert!(shots.contains("# n_shots = 0"));
}

#[test]
fn spectrum_gamma_zero_rows_are_real() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let status = ptsim()
        .args(["spectrum", "--gamma-grid", "0:64:11", "--output"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = read(&out);
    let first = text.lines().find(|l| l.starts_with("0.0")).unwrap();
    let fields: Vec<f64> = first.split(',').map(|v| v.parse().unwrap()).collect();
    // γ = 0 row: H_eff eigenvalues are real (imaginary columns vanish).
    assert_eq!(fields[6], 0.0);
    assert_eq!(fields[8], 0.0);
}

#[test]
fn spectrum_hpt_coalesces_at_ep_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let status = ptsim()
        .args(["spectrum", "--gamma-grid", "0:64:101", "--output"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = read(&out);
    // The γ/Ω = 1 row carries exactly zero H_PT eigenvalues.
    let row = text
        .lines()
        .find(|l| l.starts_with("1.00000000e0,"))
        .expect("EP row missing from the grid");
    let fields: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
    for f in &fields[1..5] {
        assert_eq!(*f, 0.0, "H_PT eigenvalues should coalesce to zero at the EP");
    }
}
