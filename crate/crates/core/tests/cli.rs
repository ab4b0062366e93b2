use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use pmetric::report::{strip_timestamp, Report};

fn pmetric(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmetric"))
        .args(args)
        .env_remove("PMETRIC_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn align_reports_score_distance_and_witness() {
    let out = pmetric(&[
        "align", "--alpha", "1", "--beta", "-1", "--gamma", "-2", "CGATC", "CAGA",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = Report::parse(&stdout(&out)).unwrap();
    assert_eq!(report.get("score"), Some("-2"));
    assert_eq!(report.get("pmetric"), Some("2"));
    assert_eq!(report.get("witness"), Some("CGATC / C-AGA"));
}

#[test]
fn punctured_line_is_not_strong() {
    let out = pmetric(&[
        "check-axioms",
        "--space",
        "punctured-line",
        "--axiom",
        "sssd",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stdout(&out).contains("sssd: FAIL witness (a, 0)"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn declared_classes_pass() {
    for space in [
        "metric-line",
        "punctured-line",
        "sum-space",
        "alignment:alpha=2,beta=-1,gamma=-1,alphabet=AB",
    ] {
        let out = pmetric(&[
            "check-axioms",
            "--space",
            space,
            "--samples",
            "300",
            "--seed",
            "3",
        ]);
        assert_eq!(out.status.code(), Some(0), "{space}: {}", stdout(&out));
    }
}

#[test]
fn seed_from_environment() {
    let args = [
        "check-axioms",
        "--space",
        "punctured-line",
        "--samples",
        "200",
    ];
    let from_env = Command::new(env!("CARGO_BIN_EXE_pmetric"))
        .args(args)
        .env("PMETRIC_SEED", "11")
        .output()
        .unwrap();
    let explicit = pmetric(&[&args[..], &["--seed", "11"]].concat());
    let other = pmetric(&[&args[..], &["--seed", "12"]].concat());
    assert_eq!(
        strip_timestamp(&stdout(&from_env)),
        strip_timestamp(&stdout(&explicit))
    );
    assert_ne!(
        strip_timestamp(&stdout(&explicit)),
        strip_timestamp(&stdout(&other))
    );
    assert!(stdout(&from_env).contains("seed: 11"));
}

#[test]
fn identical_command_lines_give_identical_reports() {
    let args = [
        "orbit",
        "--space",
        "punctured-line",
        "--x0",
        "1",
        "--limit",
        "0",
        "--limit",
        "a",
    ];
    let a = stdout(&pmetric(&args));
    let b = stdout(&pmetric(&args));
    assert_eq!(strip_timestamp(&a), strip_timestamp(&b));
    assert!(a.contains("limit: a limit_only"));
}

#[test]
fn out_file_and_replay() {
    let path = scratch("fixpoint.report");
    let out = pmetric(&[
        "fixpoint",
        "--map",
        "linear:a=1/2,b=1",
        "--x0",
        "100",
        "--variant",
        "T6.4",
        "--r",
        "0",
        "--c",
        "1/2",
        "--start",
        "0",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let report = Report::parse(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report.get("fixed_point"), Some("2"));
    let replay = pmetric(&["replay", path.to_str().unwrap()]);
    assert_eq!(replay.status.code(), Some(0), "{}", stdout(&replay));
    assert!(stdout(&replay).contains("check: PASS certificate replays"));
}

#[test]
fn tampered_report_fails_replay() {
    let path = scratch("align.report");
    let out = pmetric(&["align", "CGATC", "CAGA", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&path)
        .unwrap()
        .replace("\"score\": -2.0", "\"score\": -1.0");
    fs::write(&path, text).unwrap();
    let replay = pmetric(&["replay", path.to_str().unwrap()]);
    assert_eq!(replay.status.code(), Some(1), "{}", stdout(&replay));
}

#[test]
fn words_file_records() {
    let path = scratch("words.fa");
    fs::write(&path, ">first\ncga\nTC\n>second\nCAGA\n").unwrap();
    let out = pmetric(&["align", "--words-file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("score: -2"));

    let bad = scratch("bad.fa");
    fs::write(&bad, ">first\nCGAUC\n").unwrap();
    let out = pmetric(&["align", "--words-file", bad.to_str().unwrap(), "CAGA"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(
        err.contains("'U'") && err.contains("position 3") && err.contains("record `first`"),
        "{err}"
    );
}

#[test]
fn usage_errors_exit_two() {
    let cases: [&[&str]; 5] = [
        &["frobnicate"],
        &["align", "--beta", "-3", "--gamma", "-1", "A", "C"],
        &["orbit", "--space", "hyperbolic", "--x0", "1"],
        &["fixpoint", "--x0", "1", "--variant", "T6.4"],
        &["align", "ACGT"],
    ];
    for args in cases {
        assert_eq!(pmetric(args).status.code(), Some(2), "{args:?}");
    }
    let err = stderr(&pmetric(cases[1]));
    assert!(err.contains("beta >= 2*gamma"), "{err}");
}

#[test]
fn negative_and_rational_values() {
    let out = pmetric(&[
        "orbit",
        "--map",
        "linear:a=-1/2,b=0",
        "--x0",
        "-3/4",
        "--limit",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("limit: 0 special_limit"));
}

#[test]
fn divergent_orbit_fails() {
    let out = pmetric(&[
        "orbit",
        "--map",
        "translate:b=1",
        "--x0",
        "0",
        "--blowup",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("cauchy_verdict: diverged"));
}

#[test]
fn exp_sin_at_a_loose_tolerance() {
    let out = pmetric(&[
        "fixpoint",
        "--map",
        "exp_sin",
        "--x0",
        "0",
        "--variant",
        "T1.10-2",
        "--tol",
        "1e-6",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let report = Report::parse(&stdout(&out)).unwrap();
    let a: f64 = report.get("fixed_point").unwrap().parse().unwrap();
    assert!((a - std::f64::consts::FRAC_PI_2).abs() < 1e-2);
}

#[test]
fn min_check_command() {
    let ok = pmetric(&[
        "min-check",
        "--lo",
        "0",
        "--hi",
        "10",
        "--c",
        "0.6",
        "--seed",
        "5",
    ]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    let bad = pmetric(&[
        "min-check",
        "--map",
        "translate:b=1",
        "--lo",
        "0",
        "--hi",
        "10",
        "--c",
        "0.9",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("sampled_condition: FAIL"));
}
