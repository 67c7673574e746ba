//! Command behaviour and the exit-code contract, through both the library
//! entry point and the built binary.

use std::fs;
use std::path::Path;
use std::process::Command as Process;

use maxwell_flow::cli::{execute, Command, Outcome, FAILED_MARKER};
use maxwell_flow::config::parse_config;
use maxwell_flow::io::read_snapshot;

fn run_in(dir: &Path, text: &str, cmd: Command) -> (Outcome, String) {
    let cfg = parse_config(&format!("{text}\noutput_dir = {}", dir.display())).unwrap();
    let mut log = Vec::new();
    let outcome = execute(cmd, &cfg, &mut log);
    (outcome, String::from_utf8(log).unwrap())
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn binary() -> Process {
    Process::new(env!("CARGO_BIN_EXE_maxwell-flow"))
}

#[test]
fn simulate_default_writes_twenty_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let (outcome, _) = run_in(dir.path(), "", Command::Simulate);
    assert_eq!(outcome, Outcome::Success);
    for k in 0..20 {
        let path = dir.path().join(format!("snapshot_{k:04}.bin"));
        let snap = read_snapshot(fs::File::open(path).unwrap()).unwrap();
        assert!((snap.time - 0.01 * (k + 1) as f64).abs() < 1e-12);
        assert_eq!(snap.field.grid().cells(), [512, 1, 1]);
    }
    assert!(!dir.path().join("snapshot_0020.bin").exists());
    let entropy = csv_rows(&dir.path().join("entropy.csv"));
    assert!(entropy.windows(2).all(|w| w[1][3] <= w[0][3]));
    assert!(!dir.path().join(FAILED_MARKER).exists());
}

#[test]
fn simulate_vacuum_adjacent_reports_cell() {
    let dir = tempfile::tempdir().unwrap();
    let (outcome, log) = run_in(dir.path(), "rho_amp = 1.5\ncells = 64", Command::Simulate);
    assert_eq!(outcome, Outcome::StateViolation);
    assert_eq!(outcome.code(), 2);
    assert!(log.contains("warning"));
    let marker = fs::read_to_string(dir.path().join(FAILED_MARKER)).unwrap();
    assert!(marker.contains("rho") && marker.contains("cell"), "{marker}");
}

#[test]
fn simulate_zero_length_run() {
    let dir = tempfile::tempdir().unwrap();
    let (outcome, _) = run_in(dir.path(), "t_end = 0\ncells = 64", Command::Simulate);
    assert_eq!(outcome, Outcome::Success);
    assert!(dir.path().join("snapshot_0000.bin").exists());
    assert!(!dir.path().join("snapshot_0001.bin").exists());
}

#[test]
fn stale_marker_is_cleared_by_a_successful_run() {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), "rho_amp = 1.5\ncells = 64", Command::Simulate);
    assert!(dir.path().join(FAILED_MARKER).exists());
    let (outcome, _) = run_in(dir.path(), "cells = 64", Command::Simulate);
    assert_eq!(outcome, Outcome::Success);
    assert!(!dir.path().join(FAILED_MARKER).exists());
}

#[test]
fn compare_writes_finite_error_rows() {
    let dir = tempfile::tempdir().unwrap();
    let (outcome, _) = run_in(dir.path(), "cells = 128", Command::Compare);
    assert_eq!(outcome, Outcome::Success);
    let rows = csv_rows(&dir.path().join("errors.csv"));
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().all(|r| r.len() == 7 && r.iter().all(|v| v.is_finite())));
    assert!(rows.iter().all(|r| r[0] == 0.1 && r[6] > 0.0));
}

#[test]
fn compare_self_mode_is_exactly_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (outcome, _) = run_in(dir.path(), "cells = 64\ncompare_mode = self", Command::Compare);
    assert_eq!(outcome, Outcome::Success);
    let rows = csv_rows(&dir.path().join("errors.csv"));
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().all(|r| r[2..].iter().all(|&v| v == 0.0)));
}

#[test]
fn compare_schedule_mismatch_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let (outcome, log) = run_in(dir.path(), "cells = 64\nns_snapshots = 10", Command::Compare);
    assert_eq!(outcome, Outcome::Usage);
    assert!(log.contains("schedule"), "{log}");
    assert!(dir.path().join(FAILED_MARKER).exists());
}

#[test]
fn sweep_needs_three_values() {
    let dir = tempfile::tempdir().unwrap();
    let (outcome, _) = run_in(dir.path(), "cells = 64\neps_list = 0.1, 0.05", Command::Sweep);
    assert_eq!(outcome, Outcome::Usage);
}

#[test]
fn sweep_writes_rate_and_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let text = "cells = 64\neps_list = 0.2, 0.1, 0.05\nt_end = 0.05\nsnapshots = 5";
    let (outcome, log) = run_in(dir.path(), text, Command::Sweep);
    assert!(matches!(outcome, Outcome::Success | Outcome::RateFailure), "{log}");
    assert_eq!(csv_rows(&dir.path().join("errors.csv")).len(), 15);
    let rate = csv_rows(&dir.path().join("rate.csv"));
    assert_eq!(rate.len(), 3);
    let verdict = fs::read_to_string(dir.path().join("verdict.txt")).unwrap();
    assert_eq!(verdict.lines().count(), 1);
    let pass = verdict.starts_with("PASS");
    assert_eq!(pass, outcome == Outcome::Success);
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_in(dir.path(), "", Command::Check).0, Outcome::Success);
    let rows = fs::read_to_string(dir.path().join("structure.csv")).unwrap();
    assert_eq!(rows.lines().count(), 101);
    assert_eq!(
        run_in(dir.path(), "structure_tol = 1e-18", Command::Check).0,
        Outcome::StructureFailure
    );
    assert_eq!(
        run_in(dir.path(), "corrupt_coupling = 0.5", Command::Check).0,
        Outcome::StructureFailure
    );
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "eos_gamma = 0.9\n").unwrap();
    let out = binary()
        .args(["check", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eos_gamma"));

    let out = binary().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    fs::write(&cfg, "structure_tol = 1e-18\n").unwrap();
    let out = binary()
        .args(["check", "--threads", "2", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn binary_help_documents_defaults() {
    let out = binary().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for needle in ["simulate", "compare", "sweep", "check", "--config", "--out", "--threads", "eps_list", "t_end"] {
        assert!(text.contains(needle), "help lacks {needle}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "cells = 32, 32\ndim = 2\nvel_amp = 0.2\nwavevector = 1, 1, 0\nt_end = 0.05\n").unwrap();
    let outputs: Vec<Vec<(String, Vec<u8>)>> = ["1", "3"]
        .iter()
        .map(|threads| {
            let out = dir.path().join(format!("out{threads}"));
            for _ in 0..2 {
                let run = binary()
                    .args(["simulate", "--threads", threads, "--config"])
                    .arg(&cfg)
                    .arg("--out")
                    .arg(&out)
                    .output()
                    .unwrap();
                assert!(run.status.success());
            }
            let mut files: Vec<_> = fs::read_dir(&out)
                .unwrap()
                .map(|e| {
                    let e = e.unwrap();
                    (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
                })
                .collect();
            files.sort();
            files
        })
        .collect();
    assert_eq!(outputs[0].len(), 21);
    assert_eq!(outputs[0], outputs[1]);
}
