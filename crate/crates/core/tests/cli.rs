use std::fs;
use std::process::Command;

fn study() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nlsw-study"))
}

#[test]
fn single_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("single.csv");
    let status = study()
        .args(["single", "--M", "16", "--tau", "1/100", "--series-every", "50", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "case,beta,eps,M,tau,t_final,err_h1,err_l2,err_linf,mass_drift,energy_drift,n_steps,wall_ms"
    );
    assert!(lines.next().unwrap().starts_with("I,0.0000000000000000e0,1.0000000000000000e0,16,"));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("single.json")).unwrap()).unwrap();
    assert_eq!(summary["kind"], "single");
    assert_eq!(summary["checks"][0]["pass"], true);
    let series = fs::read_to_string(dir.path().join("single.series.csv")).unwrap();
    assert_eq!(series.lines().count(), 1 + 2);
}

#[test]
fn config_file_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("study.cfg");
    fs::write(&cfg, "# small run\nM = 8\ntau = 1/10\neps = 1/2\n").unwrap();
    let output = study()
        .args(["single", "--config"])
        .arg(&cfg)
        .args(["--M", "16"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let row: Vec<&str> = stdout.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[2], "5.0000000000000000e-1");
    assert_eq!(row[3], "16");
    assert_eq!(row[11], "10");
}

#[test]
fn invalid_beta_exits_nonzero() {
    let output = study().args(["single", "--beta", "3"]).output().unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("beta"));
}

#[test]
fn oracle_check_exit_status_follows_threshold() {
    assert!(study().args(["oracle-check", "--eps", "0"]).status().unwrap().success());
    let failing = study()
        .args(["oracle-check", "--eps", "1", "--ref-M", "32", "--ref-tau", "0.05"])
        .output()
        .unwrap();
    assert!(!failing.status.success());
    assert!(String::from_utf8_lossy(&failing.stderr).contains("disagreement"));
}
