//! Reports for the golden specs are pinned byte for byte. Set
//! `CLOCKSYS_BLESS=1` to rewrite the expected files.

mod common;

use std::process::Command;

use common::{argv, expected_report, run_case, CASES};

#[test]
fn reports_match_golden_files() {
    let bless = std::env::var_os("CLOCKSYS_BLESS").is_some();
    for case in CASES {
        let json = run_case(case, &[]).to_json();
        let path = expected_report(case);
        if bless {
            std::fs::write(&path, &json).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(json, want, "report for {} drifted", case.name);
    }
}

#[test]
fn repeated_runs_are_identical() {
    for case in CASES {
        assert_eq!(run_case(case, &[]).to_json(), run_case(case, &[]).to_json(), "{}", case.name);
    }
}

#[test]
fn parallel_runs_agree_with_sequential_ones() {
    for case in CASES {
        let mut a = run_case(case, &[]);
        let mut b = run_case(case, &["--parallel"]);
        a.command.clear();
        b.command.clear();
        assert_eq!(a, b, "{}", case.name);
    }
}

#[test]
fn binary_exit_codes_follow_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    for case in CASES {
        let out_path = dir.path().join(format!("{}.json", case.name));
        let status = Command::new(env!("CARGO_BIN_EXE_clocksys"))
            .args(argv(case))
            .arg("--report")
            .arg(&out_path)
            .output()
            .unwrap();
        assert_eq!(status.status.code(), Some(case.exit), "{}", case.name);
        let written = std::fs::read_to_string(&out_path).unwrap();
        assert_eq!(written, run_case(case, &[]).to_json(), "{}", case.name);
    }
}

#[test]
fn usage_errors_exit_two() {
    let bin = env!("CARGO_BIN_EXE_clocksys");
    let spec = common::golden_dir().join("toggle.spec");
    let missing_flag = Command::new(bin).args(["represent", "--spec"]).arg(&spec).output().unwrap();
    assert_eq!(missing_flag.status.code(), Some(2));
    let unknown_command = Command::new(bin).args(["frobnicate", "--spec"]).arg(&spec).output().unwrap();
    assert_eq!(unknown_command.status.code(), Some(2));
    let missing_file = Command::new(bin).args(["validate", "--spec", "/nonexistent/x.spec"]).output().unwrap();
    assert_eq!(missing_file.status.code(), Some(2));
}
