use std::process::Command;

fn qreduce() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qreduce"))
}

#[test]
fn preset_run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = qreduce()
        .args(["qkd", "--preset", "qkd-basic", "--seed", "9", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["seed"], 9);
    assert_eq!(summary["results"]["qber"], 0.0);
    assert_eq!(summary["results"]["keys_equal"], true);
    let csv = std::fs::read_to_string(dir.path().join("rounds.csv")).unwrap();
    assert!(csv.starts_with("round,left_choice,left_bit,right_choice,right_bit,sifted,disclosed\n"));
    let keys = std::fs::read_to_string(dir.path().join("keys.txt")).unwrap();
    let lines: Vec<&str> = keys.lines().collect();
    assert_eq!(
        lines[0].split_whitespace().nth(1),
        lines[1].split_whitespace().nth(1)
    );
}

#[test]
fn config_file_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    std::fs::write(
        &cfg,
        r#"{"kind": "strategy", "seed": 4, "plan": [{"n": [0, 0, 1], "m": [0, 0, 1]}, {"n": [1, 0, 0], "m": [0, 0, 1]}]}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = qreduce()
        .args(["strategy", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(out_dir.join("events.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("k,n_x,n_y,n_z,m_x,m_y,m_z,P_k,d_k,b_k\n"));
}

#[test]
fn chsh_preset_reports_s() {
    let dir = tempfile::tempdir().unwrap();
    let out = qreduce()
        .args(["chsh", "--preset", "chsh-optimal", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let results: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let s = results["S"].as_f64().unwrap().abs();
    let stderr = results["stderr"].as_f64().unwrap();
    assert!((s - 2.0 * 2f64.sqrt()).abs() <= 4.0 * stderr);
}

#[test]
fn kind_mismatch_and_bad_field_fail() {
    let dir = tempfile::tempdir().unwrap();
    let out = qreduce()
        .args(["epr", "--preset", "qkd-basic", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());

    let cfg = dir.path().join("bad.json");
    std::fs::write(
        &cfg,
        r#"{"kind": "qkd", "rounds": 10, "epsilon": 1.5, "sample_fraction": 0.5, "bases": [[0,0,1],[1,0,0]]}"#,
    )
    .unwrap();
    let out = qreduce()
        .args(["qkd", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon"));
}

#[test]
fn missing_source_fails() {
    let out = qreduce().args(["dynamics"]).output().unwrap();
    assert!(!out.status.success());
}
