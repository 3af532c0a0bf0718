use std::process::Command;

use clusterbus::cli::CSV_HEADER;

fn clusterbus(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_clusterbus")).args(args).env_remove("CLUSTERBUS_THREADS").output().unwrap()
}

#[test]
fn simulate_writes_csv() {
    let out = clusterbus(&["simulate-surface", "--d", "3", "--p", "0.001,1/500", "--trials", "2000", "--seed", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    assert_eq!(lines.count(), 2);
}

#[test]
fn json_and_out_file() {
    let dir = std::env::temp_dir().join(format!("clusterbus-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("rows.json");
    let out = clusterbus(&["bounds", "--name", "latency-max-R", "--p0", "1/2", "--delta", "4", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rows[0]["bound_value"], 81.0);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn bad_arguments_exit_nonzero() {
    assert_eq!(clusterbus(&["simulate-cluster", "--d", "3", "--p", "0.01"]).status.code(), Some(1));
    assert_eq!(clusterbus(&["bounds", "--name", "surface-failure", "--d", "3", "--p", "0.5"]).status.code(), Some(1));
    assert_eq!(clusterbus(&["simulate-surface", "--d", "1", "--p", "0.01"]).status.code(), Some(1));
    assert_eq!(clusterbus(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn oracle_check_passes() {
    let out = clusterbus(&["oracle-check", "--level", "exhaustive-d2"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("PASS oracle exhaustive-d2: 1024/1024"));
}
