//! End-to-end tests of the `gravnu` binary: exit codes, output shape,
//! precedence, and byte-level determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn gravnu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gravnu"))
        .args(args)
        .env_remove("GRAVNU_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

fn value_of(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|line| line.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("missing `{key}` in output:\n{text}"))
        .parse()
        .unwrap()
}

fn temp_path(name: &str) -> PathBuf {
    let mut path = std::env::temp_dir();
    path.push(format!("gravnu-test-{}-{name}", std::process::id()));
    path
}

#[test]
fn single_k3_evaluation_prints_all_pieces() {
    let output = gravnu(&[
        "k3",
        "--direction",
        "outward",
        "--gm",
        "3e7",
        "--r-source",
        "1e8",
        "--baseline",
        "3e8",
        "--energy",
        "300",
        "--alpha",
        "mu",
        "--units",
        "paper_figure",
    ]);
    assert!(output.status.success());
    let text = stdout(&output);
    let k3 = value_of(&text, "k3");
    let sum = value_of(&text, "c_0_l") + value_of(&text, "c_l_2l") - value_of(&text, "c_0_2l");
    assert!((k3 - sum).abs() <= 1e-12);
    assert!(text.contains("violation = "));
    assert!(text.contains("# units = paper_figure"));
}

#[test]
fn zero_gm_single_evaluation_matches_flat_pipeline() {
    let output = gravnu(&["k3", "--gm", "0", "--energy", "300"]);
    assert!(output.status.success());
    let k3 = value_of(&stdout(&output), "k3");
    // Flat pipeline computed directly from the library.
    let params = gravnu::oscillation::OscillationParams::new(
        0.59,
        7.92e-5,
        gravnu::units::UnitsMode::PaperFigure,
    )
    .unwrap();
    let phi = gravnu::oscillation::phase_flat(&params, 3.0e8, 300.0).unwrap();
    let phi2 = gravnu::oscillation::phase_flat(&params, 6.0e8, 300.0).unwrap();
    let expected = gravnu::lgi::k3_from_phases(0.59, phi, phi2, gravnu::oscillation::Flavor::Muon);
    assert!((k3 - expected).abs() <= 1e-12);
}

#[test]
fn coherence_zero_baseline_is_zero() {
    let output = gravnu(&["coherence", "--baseline", "0"]);
    assert!(output.status.success());
    assert_eq!(value_of(&stdout(&output), "coherence"), 0.0);
}

#[test]
fn coherence_flat_matches_probability_arithmetic() {
    let output = gravnu(&["coherence", "--gm", "0", "--baseline", "2.5e8"]);
    assert!(output.status.success());
    let got = value_of(&stdout(&output), "coherence");
    let phi: f64 = 7.92e-5 * 2.5e8 / (2.0 * 300.0);
    let p = (2.0 * 0.59_f64).sin().powi(2) * (0.5 * phi).sin().powi(2);
    assert!((got - 2.0 * (p * (1.0 - p)).sqrt()).abs() <= 1e-12);
}

#[test]
fn preset_sweep_writes_full_csv() {
    let path = temp_path("fig1a.csv");
    let output = gravnu(&[
        "k3",
        "--sweep",
        "--preset",
        "fig1a",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let data_rows = csv
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('x'))
        .count();
    assert_eq!(data_rows, 2000);
    assert!(csv.contains("# kind = k3_energy"));
}

#[test]
fn preset_implies_sweep() {
    let output = gravnu(&["coherence", "--preset", "fig2a"]);
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("x,flat,curved"));
    assert_eq!(
        text.lines()
            .filter(|l| l.contains(',') && !l.starts_with('#'))
            .count(),
        2001
    );
}

#[test]
fn repeated_preset_runs_are_byte_identical() {
    for format in ["csv", "json"] {
        let a = gravnu(&["k3", "--preset", "fig1b", "--format", format]);
        let b = gravnu(&["k3", "--preset", "fig1b", "--format", format]);
        assert!(a.status.success() && b.status.success());
        assert_eq!(a.stdout, b.stdout, "{format} output differs between runs");
    }
}

#[test]
fn json_sweep_has_summary_and_is_parseable() {
    let output = gravnu(&["coherence", "--preset", "fig2b", "--format", "json"]);
    assert!(output.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(parsed["spec"]["kind"], "coherence_baseline");
    assert_eq!(parsed["rows"].as_array().unwrap().len(), 2000);
    assert!(parsed["summary"]["max_flat"].as_f64().unwrap() > 0.99);
    assert!(parsed["summary"]["violations"]["flat"]
        .as_array()
        .unwrap()
        .is_empty());
}

#[test]
fn usage_errors_exit_2() {
    let output = gravnu(&["k3", "--no-such-flag"]);
    assert_eq!(output.status.code(), Some(2));
    let output = gravnu(&["k3", "--direction", "sideways"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("sideways"));
}

#[test]
fn domain_errors_exit_3_and_name_the_precondition() {
    let output = gravnu(&[
        "k3",
        "--direction",
        "inward",
        "--r-source",
        "1e8",
        "--baseline",
        "3e8",
    ]);
    assert_eq!(output.status.code(), Some(3));
    assert!(stderr(&output).contains("inward baseline exceeds source radius"));

    let output = gravnu(&["k3", "--gm", "-1"]);
    assert_eq!(output.status.code(), Some(3));
    assert!(stderr(&output).contains("nonnegative"));

    let output = gravnu(&["coherence", "--r-source", "5e7"]);
    assert_eq!(output.status.code(), Some(3));
    assert!(stderr(&output).contains("horizon"));
}

#[test]
fn config_file_layering_and_flag_precedence() {
    let path = temp_path("config.json");
    std::fs::write(
        &path,
        r#"{"gm": 0, "direction": "inward", "r_source": 9e8}"#,
    )
    .unwrap();

    // Config applies.
    let output = gravnu(&["k3", "--config", path.to_str().unwrap()]);
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("# direction = inward"));
    assert!(text.contains("# gm = 0.0000000000000000e0"));

    // Flags beat config.
    let output = gravnu(&["k3", "--config", path.to_str().unwrap(), "--gm", "3e7"]);
    assert!(output.status.success());
    assert!(stdout(&output).contains("# gm = 3.0000000000000000e7"));

    // GRAVNU_CONFIG is the default config path.
    let output = Command::new(env!("CARGO_BIN_EXE_gravnu"))
        .args(["k3"])
        .env("GRAVNU_CONFIG", &path)
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(stdout(&output).contains("# direction = inward"));

    std::fs::remove_file(&path).ok();
}

#[test]
fn malformed_config_exits_2() {
    let path = temp_path("bad-config.json");
    std::fs::write(&path, "{not json").unwrap();
    let output = gravnu(&["k3", "--config", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    std::fs::remove_file(&path).ok();

    let path = temp_path("bad-key.json");
    std::fs::write(&path, r#"{"graviton": 1}"#).unwrap();
    let output = gravnu(&["k3", "--config", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("graviton"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn preset_of_wrong_kind_is_a_usage_error() {
    let output = gravnu(&["k3", "--preset", "fig2a"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("coherence"));
}

#[test]
fn selftest_passes_and_is_seed_reproducible() {
    let a = gravnu(&["selftest", "--seed", "12345"]);
    assert!(a.status.success(), "selftest failed:\n{}", stdout(&a));
    let b = gravnu(&["selftest", "--seed", "12345"]);
    assert_eq!(a.stdout, b.stdout);
    let c = gravnu(&["selftest", "--seed", "999"]);
    assert!(c.status.success());
    assert_ne!(
        a.stdout, c.stdout,
        "different seeds must sample differently"
    );
    for suite in [
        "oracle-equivalence",
        "unitarity",
        "gm->0 reduction",
        "round-trip",
        "validation",
    ] {
        assert!(stdout(&a).contains(suite), "missing suite `{suite}`");
    }
}

#[test]
fn data_goes_to_stdout_diagnostics_to_stderr() {
    let output = gravnu(&["coherence", "--baseline", "1e8"]);
    assert!(output.status.success());
    assert!(stderr(&output).is_empty());
    assert!(!stdout(&output).is_empty());

    let output = gravnu(&["coherence", "--r-source", "1e7"]);
    assert!(!output.status.success());
    assert!(stdout(&output).is_empty());
    assert!(!stderr(&output).is_empty());
}
