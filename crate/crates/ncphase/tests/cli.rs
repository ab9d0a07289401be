//! End-to-end tests of the command-line surface: exit codes, validation
//! diagnostics, determinism, and the verify round trip.

use std::path::{Path, PathBuf};
use std::process::Output;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ncphase")
}

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .canonicalize()
        .unwrap()
}

fn run(args: &[&str]) -> Output {
    std::process::Command::new(bin())
        .args(args)
        .output()
        .expect("spawn ncphase")
}

fn run_env(args: &[&str], key: &str, value: &str) -> Output {
    std::process::Command::new(bin())
        .args(args)
        .env(key, value)
        .output()
        .expect("spawn ncphase")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_scenario(dir: &Path, name: &str, value: &serde_json::Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn missing_scenario_file_is_io_failure() {
    let out = run(&["check-quantum", "--scenario", "/nonexistent/nope.json"]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
}

#[test]
fn broken_json_is_parse_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = run(&["check-quantum", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
}

#[test]
fn non_square_covariance_reports_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let scen = write_scenario(
        dir.path(),
        "bad.json",
        &serde_json::json!({
            "modes": 1,
            "partition": [1, 0],
            "state": {
                "kind": "explicit",
                "mean": [0.0, 0.0],
                "cov": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
                "picture": "commutative",
                "ordering": "global"
            }
        }),
    );
    let out = run(&["check-quantum", "--scenario", &scen]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).contains("state.cov"), "{}", stderr(&out));
}

#[test]
fn all_violations_reported_at_once() {
    let dir = tempfile::tempdir().unwrap();
    let scen = write_scenario(
        dir.path(),
        "multi.json",
        &serde_json::json!({
            "hbar": -1.0,
            "modes": 2,
            "partition": [2, 1],
            "state": {"kind": "thermal", "occupations": [0.1]}
        }),
    );
    let out = run(&["check-quantum", "--scenario", &scen]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    for needle in ["hbar:", "partition:", "state.occupations:"] {
        assert!(err.contains(needle), "missing {needle} in {err}");
    }
}

#[test]
fn subvacuum_state_is_physics_negative() {
    let scen = scenario_dir().join("subvacuum.json");
    let out = run(&["check-quantum", "--scenario", scen.to_str().unwrap()]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("false"), "{text}");
}

#[test]
fn entangled_state_is_physics_negative() {
    let scen = scenario_dir().join("tms_r05.json");
    let out = run(&["check-separable", "--scenario", scen.to_str().unwrap()]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert!(stdout(&out).contains("entangled"), "{}", stdout(&out));
}

#[test]
fn cross_party_theta_rejected_for_separability() {
    let dir = tempfile::tempdir().unwrap();
    let scen = write_scenario(
        dir.path(),
        "cross.json",
        &serde_json::json!({
            "modes": 2,
            "partition": [1, 1],
            "theta": 0.2,
            "state": {"kind": "vacuum"}
        }),
    );
    let out = run(&["check-separable", "--scenario", &scen]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).contains("cross-party"), "{}", stderr(&out));
}

#[test]
fn bell_needs_two_modes() {
    let dir = tempfile::tempdir().unwrap();
    let scen = write_scenario(
        dir.path(),
        "three.json",
        &serde_json::json!({
            "modes": 3,
            "partition": [2, 1],
            "state": {"kind": "vacuum"}
        }),
    );
    let out = run(&["bell", "--scenario", &scen]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).contains("modes"), "{}", stderr(&out));
}

#[test]
fn evolve_compare_needs_hamiltonian_and_times() {
    let dir = tempfile::tempdir().unwrap();
    let no_h = write_scenario(
        dir.path(),
        "no_h.json",
        &serde_json::json!({
            "modes": 2,
            "partition": [1, 1],
            "state": {"kind": "vacuum"},
            "times": [0.0, 1.0]
        }),
    );
    let out = run(&["evolve-compare", "--scenario", &no_h]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("hamiltonian"), "{}", stderr(&out));

    let no_t = write_scenario(
        dir.path(),
        "no_t.json",
        &serde_json::json!({
            "modes": 2,
            "partition": [1, 1],
            "state": {"kind": "vacuum"},
            "hamiltonian": {"g": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}
        }),
    );
    let out = run(&["evolve-compare", "--scenario", &no_t]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("times"), "{}", stderr(&out));
}

#[test]
fn empty_scan_range_rejected() {
    let scen = scenario_dir().join("flip_state.json");
    let out = run(&[
        "kinematic-scan",
        "--scenario",
        scen.to_str().unwrap(),
        "--theta-range",
        "0:0.5:0",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("empty grid"), "{}", stderr(&out));
}

#[test]
fn scan_rejects_deformed_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let scen = write_scenario(
        dir.path(),
        "deformed.json",
        &serde_json::json!({
            "modes": 4,
            "partition": [2, 2],
            "theta": 0.1,
            "state": {"kind": "vacuum"}
        }),
    );
    let out = run(&["kinematic-scan", "--scenario", &scen]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("theta-range"), "{}", stderr(&out));
}

#[test]
fn stdout_report_carries_metadata_header() {
    let scen = scenario_dir().join("vacuum.json");
    let out = run(&["check-quantum", "--scenario", scen.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# ncphase "), "{text}");
    assert_eq!(lines[1], "# command: check-quantum");
    assert_eq!(lines[2], "# scenario: vacuum.json");
    assert_eq!(lines[3], "picture,form,passes,min_eigenvalue");
}

#[test]
fn verify_without_out_is_rejected() {
    let scen = scenario_dir().join("vacuum.json");
    let out = run(&[
        "check-quantum",
        "--scenario",
        scen.to_str().unwrap(),
        "--verify",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--out"), "{}", stderr(&out));
}

#[test]
fn verify_missing_report_is_io_failure() {
    let dir = tempfile::tempdir().unwrap();
    let scen = scenario_dir().join("vacuum.json");
    let missing = dir.path().join("never_written.csv");
    let out = run(&[
        "check-quantum",
        "--scenario",
        scen.to_str().unwrap(),
        "--out",
        missing.to_str().unwrap(),
        "--verify",
    ]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
}

#[test]
fn verify_confirms_and_catches_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let scen = scenario_dir().join("thermal.json");
    let report = dir.path().join("thermal.csv");
    let report_str = report.to_str().unwrap();
    let scen_str = scen.to_str().unwrap();

    let out = run(&["check-quantum", "--scenario", scen_str, "--out", report_str]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let out = run(&[
        "check-quantum",
        "--scenario",
        scen_str,
        "--out",
        report_str,
        "--verify",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("verified"), "{}", stdout(&out));

    let text = std::fs::read_to_string(&report).unwrap();
    let tampered = text.replace("true", "false");
    std::fs::write(&report, tampered).unwrap();
    let out = run(&[
        "check-quantum",
        "--scenario",
        scen_str,
        "--out",
        report_str,
        "--verify",
    ]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn verify_confirms_physics_negative_reports() {
    let dir = tempfile::tempdir().unwrap();
    let scen = scenario_dir().join("tms_r05.json");
    let report = dir.path().join("tms.csv");
    let report_str = report.to_str().unwrap();
    let scen_str = scen.to_str().unwrap();

    let out = run(&[
        "check-separable",
        "--scenario",
        scen_str,
        "--out",
        report_str,
    ]);
    assert_eq!(code(&out), 3);
    let out = run(&[
        "check-separable",
        "--scenario",
        scen_str,
        "--out",
        report_str,
        "--verify",
    ]);
    assert_eq!(code(&out), 0, "verify of a negative verdict still confirms");
}

#[test]
fn thread_cap_invalid_value_rejected() {
    let scen = scenario_dir().join("vacuum.json");
    let args = ["check-quantum", "--scenario", scen.to_str().unwrap()];
    for bad in ["abc", "0", "-3", ""] {
        let out = run_env(&args, "NCPHASE_MAX_THREADS", bad);
        assert_eq!(code(&out), 2, "value {bad:?}: {}", stderr(&out));
        assert!(
            stderr(&out).contains("NCPHASE_MAX_THREADS"),
            "{}",
            stderr(&out)
        );
    }
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let scen = scenario_dir().join("flip_state.json");
    let scen_str = scen.to_str().unwrap();
    let free = dir.path().join("free.csv");
    let capped = dir.path().join("capped.csv");
    let args_base = [
        "kinematic-scan",
        "--scenario",
        scen_str,
        "--theta-range",
        "0:0.4:5",
        "--eta-range",
        "0:0.4:5",
    ];
    let mut args = args_base.to_vec();
    args.extend(["--out", free.to_str().unwrap()]);
    assert_eq!(code(&run(&args)), 0);
    let mut args = args_base.to_vec();
    args.extend(["--out", capped.to_str().unwrap()]);
    assert_eq!(code(&run_env(&args, "NCPHASE_MAX_THREADS", "1")), 0);
    assert_eq!(
        std::fs::read(&free).unwrap(),
        std::fs::read(&capped).unwrap(),
        "thread cap changed the scan bytes"
    );
}

fn flip_cov_json() -> serde_json::Value {
    let r = 0.35f64;
    let ch = (2.0 * r).cosh() / 2.0;
    let sh = (2.0 * r).sinh() / 2.0;
    let mut cov = vec![vec![0.0f64; 8]; 8];
    for (i, row) in cov.iter_mut().enumerate() {
        row[i] = 0.3 + ch;
    }
    for (i, j, s) in [(0usize, 4usize, sh), (1, 5, sh), (2, 6, -sh), (3, 7, -sh)] {
        cov[i][j] = s;
        cov[j][i] = s;
    }
    serde_json::json!(cov)
}

#[test]
fn scan_flip_row_cross_checked_by_check_separable() {
    let dir = tempfile::tempdir().unwrap();
    let scen = scenario_dir().join("flip_state.json");
    let report = dir.path().join("scan.csv");
    let out = run(&[
        "kinematic-scan",
        "--scenario",
        scen.to_str().unwrap(),
        "--theta-range",
        "0:0.5:11",
        "--eta-range",
        "0:0.5:11",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let text = std::fs::read_to_string(&report).unwrap();
    let flip = text
        .lines()
        .find(|l| !l.starts_with('#') && l.ends_with(",true"))
        .expect("scan found no entanglement flip");
    let fields: Vec<&str> = flip.split(',').collect();
    let theta: f64 = fields[0].parse().unwrap();
    let eta: f64 = fields[1].parse().unwrap();
    let scan_margin: f64 = fields[2].parse().unwrap();

    let mean = vec![0.0f64; 8];
    let standalone = write_scenario(
        dir.path(),
        "standalone.json",
        &serde_json::json!({
            "modes": 4,
            "partition": [2, 2],
            "theta": theta,
            "eta": eta,
            "state": {
                "kind": "explicit",
                "mean": mean,
                "cov": flip_cov_json(),
                "picture": "noncommutative",
                "ordering": "party"
            }
        }),
    );
    let out = run(&["check-separable", "--scenario", &standalone]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let row = stdout(&out);
    let row = row.lines().last().unwrap();
    let margin: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!(
        (margin - scan_margin).abs() <= 1e-12,
        "standalone margin {margin} vs scan margin {scan_margin}"
    );
}

#[test]
fn matrix_deformation_input_matches_scalar_shorthand() {
    let dir = tempfile::tempdir().unwrap();
    let scalar = write_scenario(
        dir.path(),
        "scalar.json",
        &serde_json::json!({
            "modes": 2,
            "partition": [2, 0],
            "theta": 0.2,
            "eta": 0.1,
            "state": {"kind": "vacuum"}
        }),
    );
    let matrix = write_scenario(
        dir.path(),
        "matrix.json",
        &serde_json::json!({
            "modes": 2,
            "partition": [2, 0],
            "theta": [[0.0, 0.2], [-0.2, 0.0]],
            "eta": [[0.0, 0.1], [-0.1, 0.0]],
            "state": {"kind": "vacuum"}
        }),
    );
    let a = run(&["check-quantum", "--scenario", &scalar]);
    let b = run(&["check-quantum", "--scenario", &matrix]);
    assert_eq!(code(&a), 0);
    assert_eq!(code(&b), 0);
    let line_a = stdout(&a).lines().last().unwrap().to_owned();
    let line_b = stdout(&b).lines().last().unwrap().to_owned();
    assert_eq!(line_a, line_b);
}

#[test]
fn skew_violation_in_matrix_deformation_is_validation() {
    let dir = tempfile::tempdir().unwrap();
    let scen = write_scenario(
        dir.path(),
        "notskew.json",
        &serde_json::json!({
            "modes": 2,
            "partition": [2, 0],
            "theta": [[0.0, 0.2], [0.2, 0.0]],
            "state": {"kind": "vacuum"}
        }),
    );
    let out = run(&["check-quantum", "--scenario", &scen]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("theta"), "{}", stderr(&out));
    assert!(stderr(&out).contains("skew"), "{}", stderr(&out));
}

#[test]
fn fixed_amplitude_bell_row_echoes_inputs() {
    let scen = scenario_dir().join("bell_fixed.json");
    let out = run(&["bell", "--scenario", scen.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let row = text.lines().last().unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields.len(), 11);
    let a1im: f64 = fields[1].parse().unwrap();
    assert!((a1im + 0.4).abs() < 1e-15);
    let b: f64 = fields[8].parse().unwrap();
    assert!(b > 2.0 && b < 2.83, "bell value {b}");
    assert_eq!(fields[9], "true");
}
