use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flatveech"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn build(dir: &Path, kind: &str, n: &str) -> String {
    let path = dir.join(format!("{kind}{n}.json"));
    let p = path.to_str().unwrap().to_string();
    let o = run(&["build", kind, n, "-o", &p]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    p
}

#[test]
fn build_prints_pairing_table() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("d4.json");
    let o = run(&["build", "dihedral", "4", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("pair  edge"));
    // 20 polygon edges, 10 pairs, plus header and summary lines.
    assert_eq!(text.lines().count(), 12);
    assert!(fs::read_to_string(&path)
        .unwrap()
        .contains("\"version\": 1"));
}

#[test]
fn build_rejects_small_n() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("x.json");
    let o = run(&["build", "dihedral", "2", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("N >= 3"));
    assert!(!path.exists());
}

#[test]
fn build_rejects_bad_lengths() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("x.json");
    let o = run(&[
        "build",
        "cyclic",
        "4",
        "--l3",
        "0.5",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("l3 < l2/2"));
}

#[test]
fn analyze_reports_groups() {
    let dir = TempDir::new().unwrap();
    let d4 = build(dir.path(), "dihedral", "4");
    let o = run(&["analyze", &d4]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Dihedral(4), order 8"));

    let c5 = build(dir.path(), "cyclic", "5");
    let o = run(&["analyze", &c5]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Cyclic(5), order 5"));
}

#[test]
fn analyze_json_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let d3 = build(dir.path(), "dihedral", "3");
    let strip = |o: &Output| {
        let mut v: serde_json::Value = serde_json::from_str(&stdout(o)).unwrap();
        v.as_object_mut()
            .unwrap()
            .remove("timing")
            .expect("timing field");
        v
    };
    let a = run(&["analyze", &d3, "--json", "-"]);
    let b = run(&["analyze", &d3, "--json", "-"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(strip(&a), strip(&b));

    let report = dir.path().join("r.json");
    let o = run(&[
        "analyze",
        &d3,
        "--no-veech",
        "--bound",
        "0.5",
        "--json",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("skipped"));
    let json = fs::read_to_string(report).unwrap();
    assert!(json.contains("\"veech\": null"));
    assert!(json.contains("\"saddle_bound\": 0.5"));
}

#[test]
fn torus_file_fails_cleanly() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("torus.json");
    fs::write(
        &path,
        r#"{
  "version": 1,
  "polygons": [[["0","0"],["1","0"],["1","1"],["0","1"]]],
  "pairing": [[[0,0],[0,2]],[[0,1],[0,3]]]
}"#,
    )
    .unwrap();
    let o = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cone"));
}

#[test]
fn parse_and_io_failures_exit_two() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(
        run(&["analyze", missing.to_str().unwrap()]).status.code(),
        Some(2)
    );
    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "not json").unwrap();
    assert_eq!(
        run(&["analyze", garbage.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn unpaired_edge_is_a_validation_failure() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(
        &path,
        r#"{"version":1,"polygons":[[["0","0"],["1","0"],["1","1"],["0","1"]]],"pairing":[[[0,0],[0,2]]]}"#,
    )
    .unwrap();
    assert_eq!(
        run(&["analyze", path.to_str().unwrap()]).status.code(),
        Some(1)
    );
}

#[test]
fn render_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let d3 = build(dir.path(), "dihedral", "3");
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    for out in [&a, &b] {
        let o = run(&[
            "render",
            &d3,
            "-o",
            out.to_str().unwrap(),
            "--overlay",
            "copies,segments",
            "--overlay",
            "centroids",
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let svg = fs::read_to_string(&a).unwrap();
    assert_eq!(svg, fs::read_to_string(&b).unwrap());
    assert!(svg.contains("version=\"1.1\""));
    assert_eq!(svg.matches("<circle class=\"centroid\"").count(), 6);
    assert!(svg.contains(">S6</text>"));
}

#[test]
fn epsilon_flag_is_validated() {
    let dir = TempDir::new().unwrap();
    let d4 = build(dir.path(), "dihedral", "4");
    assert_eq!(
        run(&["--epsilon=-1", "analyze", &d4]).status.code(),
        Some(1)
    );
    let o = run(&["analyze", &d4, "--epsilon", "1e-8", "--no-veech"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn saved_files_round_trip_through_build() {
    let dir = TempDir::new().unwrap();
    let p = build(dir.path(), "cyclic", "4");
    let text = fs::read_to_string(&p).unwrap();
    let (surface, family) = flatveech::load_string(&text).unwrap();
    assert_eq!(flatveech::save_string(&surface, family), text);
}
