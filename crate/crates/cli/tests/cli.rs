use std::path::Path;
use std::process::{Command, Output};

fn dicke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dicke"))
        .args(args)
        .env_remove("DICKE_CONFIG")
        .output()
        .expect("binary runs")
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn trajectory_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let r = dicke(&["trajectory", "--nu", "0.49", "--xi-range", "0:4:81", "--out", out.to_str().unwrap()]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
        let bounds = out.with_file_name(format!("{}.boundaries.csv", &name[..1]));
        runs.push((read(&out), read(&bounds)));
    }
    assert_eq!(runs[0], runs[1]);
    assert!(runs[0].0.starts_with(
        "xi,lambda_r_over_crit,lambda_cr_over_crit,phase,re_alpha,im_alpha,re_beta,im_beta,energy\n"
    ));
    assert!(runs[0].1.starts_with("xi,kind,phase_before,phase_at,phase_after\n"));
}

#[test]
fn sidecar_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("crit.csv");
    let r = dicke(&["critical-scan", "--nu-range", "0.4:0.6:5", "--out", out.to_str().unwrap()]);
    assert!(r.status.success());
    let meta: serde_json::Value = serde_json::from_str(&read(&dir.path().join("crit.csv.meta.json"))).unwrap();
    assert_eq!(meta["command"], "critical-scan");
    assert_eq!(meta["config"]["nu_range"], "0.4:0.6:5");
    assert!(meta["wall_time_s"].is_number());
    let data = read(&out);
    assert!(data.starts_with("nu_over_omega0,n0,m0,lambda_crit_over_omega0,status\n"));
    assert!(!data.contains("wall"));
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"command": "coupling-scan", "xi_range": "0:1:3", "g0": 0.12}"#).unwrap();
    let r = dicke(&["--config", cfg.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = String::from_utf8(r.stdout).unwrap();
    // g0 = 0.12 doubles the ratio at xi = 0
    assert_eq!(text.lines().nth(1).unwrap(), "0,6,0");

    let r = dicke(&["--config", cfg.to_str().unwrap(), "--g0", "0.06", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(v["rows"][0][1], 3.0);
}

#[test]
fn config_path_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"command": "coupling-scan", "xi_range": "0:1:2"}"#).unwrap();
    let r = Command::new(env!("CARGO_BIN_EXE_dicke"))
        .env("DICKE_CONFIG", &cfg)
        .output()
        .unwrap();
    assert!(r.status.success());
    assert_eq!(String::from_utf8(r.stdout).unwrap().lines().count(), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(dicke(&["coupling-scan", "--xi-range", "0:1"]).status.code(), Some(2));
    assert_eq!(dicke(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(dicke(&["coupling-scan", "--g0", "-1"]).status.code(), Some(2));
    // nu = 0.5 closes the counter-rotating detuning: zero effective frequency
    assert_eq!(dicke(&["phase-diagram", "--nu", "0.5"]).status.code(), Some(3));
    assert_eq!(dicke(&["validate-rwa", "--nu", "0.5"]).status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.json");
    std::fs::write(
        &cfg,
        r#"{"command": "exact-sim", "n_qubits": 1,
            "sim": {"n_qubits": 1, "fock_dim": 8, "t_final": 1.0,
                    "initial_state": {"kind": "coherent", "re": 2.0, "im": 0.0}}}"#,
    )
    .unwrap();
    let r = dicke(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&r.stderr).contains("fock_dim"));
}

#[test]
fn validate_report_is_json() {
    let r = dicke(&["validate-rwa", "--threshold", "0.15"]);
    assert!(r.status.success());
    let v: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(v["rwa"]["value"]["pass"], true);
    assert_eq!(v["exact_sim"]["status"], "skipped");

    let r = dicke(&["validate-rwa", "--g0", "0"]);
    let v: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(v["rwa"]["value"]["pass"], true);
    assert_eq!(v["ground_state"]["value"]["phase"], "Normal");
}

#[test]
fn exact_sim_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.json");
    std::fs::write(&cfg, r#"{"sim": {"n_qubits": 2, "fock_dim": 12, "t_final": 5.0, "samples": 6}}"#).unwrap();
    let out = dir.path().join("f.csv");
    let r = dicke(&["exact-sim", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(read(&out).lines().count(), 7);
    let summary: serde_json::Value = serde_json::from_str(&read(&dir.path().join("f.summary.json"))).unwrap();
    assert!(summary["min_fidelity"].as_f64().unwrap() > 0.99);
}
