use std::path::Path;
use std::process::{Command, Output};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn railcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_railcap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    format!("{FIXTURES}/{name}.json")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn validate_accepts_fixture() {
    let out = railcap(&["validate", "--scenario", &fixture("eight_station")]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.contains("8 nodes, 18 links, 7 routes, 5 demands, 7 periods"),
        "{text}"
    );
}

#[test]
fn validate_rejects_bad_document() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let text = std::fs::read_to_string(fixture("single_train"))
        .unwrap()
        .replace("\"B-C\"\n", "\"B-Q\"\n");
    std::fs::write(&path, text).unwrap();
    let out = railcap(&["validate", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("B-Q"));
}

#[test]
fn missing_file_is_input_error() {
    let out = railcap(&["validate", "--scenario", "/nonexistent/scenario.json"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn usage_error_is_input_error() {
    let out = railcap(&[
        "solve",
        "--scenario",
        &fixture("single_train"),
        "--capacity-mode",
        "triple_track",
    ]);
    assert_eq!(code(&out), 1);
    let out = railcap(&["frobnicate"]);
    assert_eq!(code(&out), 1);
    let out = railcap(&["--help"]);
    assert_eq!(code(&out), 0);
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn solve_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("nested/out");
    let mps = dir.path().join("lp/model.mps");
    let out = railcap(&[
        "solve",
        "--scenario",
        &fixture("single_train"),
        "--out-dir",
        out_dir.to_str().unwrap(),
        "--export-lp",
        mps.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("status:     optimal"), "{stdout}");
    let usage = read(&out_dir, "capacity_usage.csv");
    assert_eq!(usage.lines().next().unwrap(), "link,1,2,3");
    assert!(usage.contains("A-B,0.93,0.08,0.00"), "{usage}");
    assert!(usage.contains("B-C,0.75,0.25,0.00"), "{usage}");
    let demand = read(&out_dir, "demand_outcome.csv");
    assert!(
        demand.starts_with("demand,route,kind,1,2,3,total"),
        "{demand}"
    );
    assert!(read(&out_dir, "capacity_by_type.csv").contains("A-B,p"));
    assert!(std::fs::read_to_string(mps).unwrap().starts_with("NAME"));
}

#[test]
fn capacity_mode_flag_overrides_document() {
    let dir = tempfile::tempdir().unwrap();
    let out = railcap(&[
        "solve",
        "--scenario",
        &fixture("single_train"),
        "--capacity-mode",
        "heterogeneous",
        "--relax-integrality",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("mode:       heterogeneous"));
}
