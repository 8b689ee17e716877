use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_tronquee");

fn tronquee(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("TRONQUEE_OUT").output().expect("binary runs")
}

// one cheap invocation per subcommand
const CASES: &[(&str, &[&str])] = &[
    ("coeffs", &["--alpha", "1", "--beta", "2", "--N", "5"]),
    ("residual", &["--alpha", "1", "--beta", "2", "--N", "8"]),
    ("eigs", &[]),
    ("integrate", &["--alpha", "1", "--beta", "-1", "--u0", "1,0", "--U0", "-1.2,0"]),
    ("tronquee", &["--family", "p4", "--case", "2", "--k0", "1", "--kinf", "0", "--rays", "2", "--radii", "3"]),
    ("perturb", &["--alpha", "1", "--beta", "2"]),
    ("overlap", &["--alpha", "1", "--beta", "2"]),
    ("sweep3ii", &["--beta", "1/2", "--nodes", "12", "--checkpoints", "4"]),
    ("scan", &["--alpha", "1", "--beta", "2"]),
];

fn with(cmd: &str, args: &[&str], extra: &[&str]) -> Vec<String> {
    std::iter::once(cmd).chain(args.iter().copied()).chain(extra.iter().copied()).map(String::from).collect()
}

fn run_owned(v: &[String]) -> Output {
    tronquee(&v.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn every_subcommand_honours_format_and_quiet() {
    for (cmd, args) in CASES {
        let json = run_owned(&with(cmd, args, &[]));
        assert_eq!(json.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&json.stderr));
        let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap_or_else(|e| panic!("{cmd}: {e}"));
        assert_eq!(v["config"]["command"], *cmd);
        assert_eq!(v["pass"], true, "{cmd}");

        let csv = run_owned(&with(cmd, args, &["--format", "csv"]));
        assert_eq!(csv.status.code(), Some(0), "{cmd}");
        let text = String::from_utf8(csv.stdout).unwrap();
        let header = text.lines().next().unwrap_or_default();
        assert!(header.contains(',') && !text.trim_start().starts_with('{'), "{cmd}: {header}");

        let quiet = run_owned(&with(cmd, args, &["--quiet"]));
        assert_eq!(quiet.status.code(), Some(0), "{cmd}");
        assert!(quiet.stdout.is_empty(), "{cmd} printed under --quiet");
    }
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn identical_configs_write_identical_bytes() {
    for (cmd, args) in CASES {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        for d in [&a, &b] {
            let out = run_owned(&with(cmd, args, &["--quiet", "--out", d.path().to_str().unwrap()]));
            assert_eq!(out.status.code(), Some(0), "{cmd}");
        }
        let json = format!("{cmd}.json");
        assert_eq!(read(a.path(), &json), read(b.path(), &json), "{cmd}");
        let svg = format!("{cmd}.svg");
        if a.path().join(&svg).exists() {
            assert_eq!(read(a.path(), &svg), read(b.path(), &svg), "{cmd}");
        }
        // the timestamp lives only in the sidecar
        let meta: serde_json::Value = serde_json::from_slice(&read(a.path(), &format!("{cmd}.meta.json"))).unwrap();
        assert!(meta["unix_time"].is_number());
        assert!(!String::from_utf8(read(a.path(), &json)).unwrap().contains("unix_time"));
    }
}

#[test]
fn csv_output_files_follow_the_format_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = tronquee(&["coeffs", "--alpha", "1", "--beta", "2", "--format", "csv", "--quiet", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("coeffs.csv").exists());
    assert!(!dir.path().join("coeffs.json").exists());
}

#[test]
fn output_directory_falls_back_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(BIN)
        .args(["eigs", "--quiet"])
        .env("TRONQUEE_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("eigs.json").exists());
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["bogus"][..],
        &["coeffs", "--family", "p5", "--beta", "1"],
        &["coeffs", "--family", "p3ii", "--alpha", "2", "--beta", "1"],
        &["coeffs", "--alpha", "1"],
        &["coeffs", "--alpha", "1", "--beta", "2", "--m", "7"],
        &["tronquee", "--family", "p4", "--case", "1", "--k0", "1", "--kinf", "0", "--k", "9"],
    ] {
        let out = tronquee(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn coefficient_output_matches_the_exact_solution() {
    // alpha = 1, beta = -1 has the terminating solution u = 1, U = -1 - 2/x
    let out = tronquee(&["coeffs", "--alpha", "1", "--beta", "-1", "--N", "6"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let text = v["result"].to_string();
    assert!(text.contains("\"-2\""), "{text}");
    let rows = tronquee(&["coeffs", "--alpha", "1", "--beta", "-1", "--N", "6", "--format", "csv"]);
    let csv = String::from_utf8(rows.stdout).unwrap();
    assert_eq!(csv.lines().count(), 1 + 7, "{csv}");
}
