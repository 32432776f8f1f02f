//! End-to-end runs of the `recres` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use recres::fuzz::FuzzReport;
use recres::verify::Report;

fn instance(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../instances").join(name)
}

fn recres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_recres")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sequence_lists_polynomials() {
    let o = recres(&["sequence", path(&instance("schur.json")), "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 4);
    assert!(out.lines().last().unwrap().ends_with("r_3 = x^3 - 2x, deg 3"), "{out}");
}

#[test]
fn sequence_up_to_d_echoes_initials() {
    let o = recres(&["sequence", path(&instance("schur.json")), "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "r_0 = 1, deg 0\nr_1 = x, deg 1\n");
}

#[test]
fn sequence_json_dump() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("seq.json");
    let o = recres(&["sequence", path(&instance("square.json")), "--n", "2", "--json", path(&json)]);
    assert_eq!(o.status.code(), Some(0));
    let dump: serde_json::Value = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(dump["sequence"][2]["coeffs"], serde_json::json!(["1", "0", "0", "1"]));
    assert_eq!(dump["sequence"][2]["degree"], "3");
}

#[test]
fn zero_v_is_a_validation_failure() {
    let o = recres(&["sequence", path(&instance("zero_v.json")), "--n", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("VZero"));
    assert!(stdout(&o).is_empty());
    // accepted, with a warning, on request
    let o = recres(&["sequence", path(&instance("zero_v.json")), "--n", "3", "--allow-zero-v"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning: VZero"));
}

#[test]
fn resultant_all_methods() {
    let o = recres(&["resultant", path(&instance("schur.json")), "--n", "3", "--method", "all"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let values: Vec<&str> = out.lines().map(|l| l.rsplit(" = ").next().unwrap()).collect();
    assert_eq!(values, vec!["-1", "-1", "-1"]);
}

#[test]
fn resultant_single_method() {
    let o = recres(&["resultant", path(&instance("schur.json")), "--n", "2", "--method", "formula"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "formula   R_2 = -1");
}

#[test]
fn resultant_report_json() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let o = recres(&["resultant", path(&instance("x_power.json")), "--n", "3", "--json", path(&json)]);
    assert_eq!(o.status.code(), Some(0));
    let report: Report = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    let r = &report.records[0];
    assert_eq!((r.formula_matches, r.euclid_matches), (Some(true), Some(true)));
    assert_eq!(r.formula, r.sylvester);
    assert_eq!(report.instance.field, "F_10007");
    assert!(report.timings.is_some());
}

#[test]
fn resultant_rejects_non_monotone_degrees() {
    let o = recres(&["resultant", path(&instance("bad_degrees.json")), "--n", "3", "--method", "all"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("DegreesNotMonotone"));
}

#[test]
fn resultant_needs_n_above_d() {
    let o = recres(&["resultant", path(&instance("schur.json")), "--n", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_schur() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("v.json");
    let o = recres(&["verify", path(&instance("schur.json")), "--n-max", "8", "--json", path(&json)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("7/7 records pass"));
    let report: Report = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(report.records.len(), 7);
    assert_eq!(report.n_range, [2, 8]);
    assert!(report.passed && report.first_failure.is_none());
    for r in &report.records {
        for flag in [r.formula_matches, r.euclid_matches, r.degree_matches, r.leading_matches, r.constant_matches] {
            assert_eq!(flag, Some(true));
        }
    }
}

#[test]
fn verify_square_and_higher_order() {
    for (name, n_max) in [("square.json", "5"), ("order_three.json", "6"), ("x_power.json", "8")] {
        let o = recres(&["verify", path(&instance(name)), "--n-max", n_max]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
    }
}

#[test]
fn verify_fails_validation_before_computing() {
    let o = recres(&["verify", path(&instance("bad_degrees.json")), "--n-max", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).is_empty());
}

#[test]
fn verify_missing_steps() {
    let o = recres(&["verify", path(&instance("schur.json")), "--n-max", "9"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("MissingStep"));
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    fs::write(&broken, "{\"schema\": 1,").unwrap();
    assert_eq!(recres(&["verify", path(&broken), "--n-max", "3"]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(recres(&["sequence", path(&missing), "--n", "3"]).status.code(), Some(2));
    let text = fs::read_to_string(instance("schur.json")).unwrap().replace("\"schema\": 1", "\"schema\": 7");
    let future = dir.path().join("future.json");
    fs::write(&future, text).unwrap();
    let o = recres(&["sequence", path(&future), "--n", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("schema"));
    assert_eq!(recres(&["fuzz", "--seed", "1", "--count", "1", "--field", "12", "--out", "x"]).status.code(), Some(2));
}

#[test]
fn fuzz_small_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = recres(&[
        "fuzz",
        "--seed",
        "1",
        "--count",
        "50",
        "--d-max",
        "2",
        "--m-max",
        "2",
        "--n-max",
        "d+3",
        "--field",
        "10007",
        "--out",
        path(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: FuzzReport = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!((report.count, report.passed, report.instances.len()), (50, 50, 50));
    assert!(report.all_passed && report.failed.is_empty());
    assert_eq!(report.coverage.edge_branch + report.coverage.generic_branch, 50);
    for (i, entry) in report.instances.iter().enumerate() {
        assert_eq!(entry.index, i);
        assert_eq!(entry.file, format!("instance_{i:04}.json"));
        assert!(out.join(&entry.file).exists());
        assert!(entry.report.timings.is_none());
    }
}

#[test]
fn fuzz_dumps_replay_to_the_same_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = recres(&["fuzz", "--seed", "4", "--count", "6", "--m-max", "3", "--k-max", "3", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let report: FuzzReport = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    for entry in &report.instances {
        let json = dir.path().join(format!("replay_{}.json", entry.index));
        let n_max = entry.report.n_range[1].to_string();
        let o = recres(&["verify", path(&out.join(&entry.file)), "--n-max", &n_max, "--json", path(&json)]);
        assert_eq!(o.status.code(), Some(0));
        let replay: Report = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
        assert_eq!(replay.records, entry.report.records);
        assert_eq!(replay.validation, entry.report.validation);
    }
}

#[test]
fn fuzz_count_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = recres(&["fuzz", "--seed", "1", "--count", "0", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    let report: FuzzReport =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert!(report.instances.is_empty() && report.all_passed);
}

#[test]
fn fuzz_exhausted_retries_exit_5() {
    let dir = tempfile::tempdir().unwrap();
    let o = recres(&[
        "fuzz",
        "--seed",
        "1",
        "--count",
        "2",
        "--m-max",
        "1",
        "--k-max",
        "0",
        "--max-retries",
        "30",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).contains("30 attempts"));
}

#[test]
fn fuzz_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let o = recres(&["fuzz", "--seed", "11", "--count", "20", "--field", "rational", "--out", path(&out)]);
        assert_eq!(o.status.code(), Some(0));
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&out)
            .unwrap()
            .map(|e| e.unwrap().path())
            .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
            .collect();
        files.sort();
        files
    };
    let a = run("a");
    assert_eq!(a.len(), 21);
    assert_eq!(a, run("b"));
}
