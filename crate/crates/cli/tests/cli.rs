use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn spec(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../specs")
        .join(name)
}

fn hetlab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hetlab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_reference_spec() {
    let dir = tempfile::tempdir().unwrap();
    let out = hetlab(&["validate", s(&spec("reference.json"))], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("result.json")).unwrap())
            .unwrap();
    assert_eq!(json["scenario"], "validate");
    assert_eq!(json["outputs"]["derived"]["k0"], 2);
    assert_eq!(json["spec_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn loops_csv_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = hetlab(
        &["loops", s(&spec("reference.json")), "--n-range", "3..8"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("result.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("n,mu_n,"));
    assert!(lines.next().unwrap().starts_with("3,0.0015625,"));
    assert_eq!(csv.lines().count(), 7);
    assert!(dir.path().join("timing.json").exists());
}

#[test]
fn v0_census_counts_and_curves() {
    let dir = tempfile::tempdir().unwrap();
    let r = spec("reference.json");
    let args = [
        "census",
        s(&r),
        "--v0",
        "--tau-min",
        "1e-6",
        "--tau-max",
        "1e-2",
    ];
    let out = hetlab(&args, dir.path());
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(dir.path().join("result.csv")).unwrap();
    let counts: Vec<usize> = rdr
        .records()
        .map(|r| r.unwrap()[1].parse().unwrap())
        .collect();
    assert_eq!(counts.len(), 2);
    assert!(counts.iter().all(|c| (11..=12).contains(c)));
    let curve = std::fs::read_to_string(dir.path().join("curves/unstable_tau_pos0.csv")).unwrap();
    assert_eq!(curve.lines().next().unwrap(), "t,x,y,dx,dy");
    assert!(dir.path().join("curves/unstable_tau_neg0.csv").exists());
    assert!(dir.path().join("crossings.csv").exists());
}

#[test]
fn tolerance_override_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let out = hetlab(
        &[
            "loops",
            s(&spec("reference.json")),
            "--n-range",
            "2..3",
            "--tol",
            "det=1e-8",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("result.json")).unwrap())
            .unwrap();
    assert_eq!(json["tolerances"]["det"], 1e-8);
    assert!(json.get("wall_time_s").is_none());
}

#[test]
fn uncertified_run_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    // n = 1 needs |mu| = 0.025 > mu_max.
    let out = hetlab(
        &["loops", s(&spec("reference.json")), "--n-range", "1..3"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(dir.path().join("result.json").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let r = spec("reference.json");
    let code = |args: &[&str]| hetlab(args, dir.path()).status.code();
    assert_eq!(code(&["loops", s(&r), "--n-range", "8..3"]), Some(64));
    assert_eq!(code(&["census", s(&r)]), Some(64));
    assert_eq!(code(&["frobnicate"]), Some(64));
    assert_eq!(code(&["validate", "/no/such/spec.json"]), Some(3));
    assert_eq!(
        code(&[
            "elliptic",
            s(&r),
            "--c-window",
            "-1e-3..-1e-3",
            "--k-range",
            "1..4"
        ]),
        Some(1)
    );
    assert_eq!(code(&["census", s(&spec("case2.json")), "--v0"]), Some(1));
    assert_eq!(
        code(&["loops", s(&r), "--n-range", "2..3", "--tol", "bogus=1"]),
        Some(1)
    );

    let bad = dir.path().join("bad.json");
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&r).unwrap()).unwrap();
    v["nu"] = serde_json::json!(1.5);
    std::fs::write(&bad, v.to_string()).unwrap();
    assert_eq!(code(&["validate", s(&bad)]), Some(4));
    assert_eq!(code(&["loops", s(&bad), "--n-range", "2..3"]), Some(4));
    std::fs::write(&bad, "{").unwrap();
    assert_eq!(code(&["validate", s(&bad)]), Some(4));
}

#[test]
fn thread_env_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_hetlab"))
            .args([
                "tangencies",
                s(&spec("reference.json")),
                "--side",
                "pos",
                "--n-range",
                "1..3",
            ])
            .arg("--out")
            .arg(dir.path())
            .env("HETLAB_THREADS", threads)
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(run("2"), Some(0));
    assert_eq!(run("zero"), Some(64));
}
