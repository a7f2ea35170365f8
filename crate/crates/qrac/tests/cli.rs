//! End-to-end checks of the command-line binary.

use std::fs;
use std::process::Command;

fn qrac() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qrac"))
}

#[test]
fn verify_n3_passes() {
    let out = qrac().args(["verify", "--n", "3"]).output().unwrap();
    assert!(out.status.success(), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    let passes = text.lines().filter(|l| l.starts_with("PASS ")).count();
    assert!(passes >= 10, "expected >= 10 checks, got:\n{text}");
    assert!(!text.contains("FAIL"));
}

#[test]
fn circuit_qasm_export() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n3k1.qasm");
    let out = qrac()
        .args(["circuit", "--n", "3", "--k", "1", "--format", "qasm"])
        .arg("--output")
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("// n=3 k=1\n"));
    assert!(text.contains("OPENQASM 2.0;"));
    assert_eq!(text.matches("\ncx ").count(), 2);

    // Byte-identical on rerun.
    let path2 = dir.path().join("again.qasm");
    qrac()
        .args(["circuit", "--n", "3", "--k", "1", "--format", "qasm"])
        .arg("--output")
        .arg(&path2)
        .output()
        .unwrap();
    assert_eq!(text, fs::read_to_string(&path2).unwrap());
}

#[test]
fn encoding_circuit_export() {
    let out = qrac()
        .args(["circuit", "--n", "3", "--y", "100", "--format", "native"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# qrac circuit n=3 encode:100\n"));
    assert!(text.contains("mcry0"));
}

#[test]
fn analyze_csv_range() {
    let out = qrac()
        .args(["analyze", "--n-range", "2..8", "--format", "csv", "--dense-up-to", "5"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines.len(), 8, "header + 7 rows:\n{text}");
    let gap_col = lines[0].split(',').position(|c| c == "gap").unwrap();
    for row in &lines[1..] {
        let gap: f64 = row.split(',').nth(gap_col).unwrap().parse().unwrap();
        assert!(gap > 0.0);
    }
}

#[test]
fn simulate_deterministic_json() {
    let run = || {
        let out = qrac()
            .args([
                "simulate", "--n", "3", "--shots", "50000", "--seed", "9", "--format", "json",
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let a = run();
    assert!(a.contains("\"empirical_p\""));
    assert_eq!(a, run());
}

#[test]
fn usage_errors_exit_2() {
    // circuit with neither --k nor --y.
    let out = qrac().args(["circuit", "--n", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error: "));
    assert_eq!(err.trim_end().lines().count(), 1);

    // Bit index out of range.
    let out = qrac()
        .args(["circuit", "--n", "3", "--k", "9"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Unknown flag is a clap parse error, also exit 2.
    let out = qrac().args(["verify", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_noise_exits_1() {
    let out = qrac()
        .args(["simulate", "--n", "3", "--shots", "10", "--noise", "1.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{out:?}");
}

#[test]
fn export_schedule_json() {
    let out = qrac().args(["export", "--n", "3", "--k", "1"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["rotations"].as_array().unwrap().len(), 2);
}
