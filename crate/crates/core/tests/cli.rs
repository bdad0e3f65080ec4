use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sdqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdqc")).args(args).env("SDQC_THREADS", "2").output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn hull_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "h.json", r#"{"points": [[-0.5, 1], [0.5, 1]]}"#);
    let csv = dir.path().join("h.csv");
    let svg = dir.path().join("h.svg");
    let json = dir.path().join("h.out.json");
    let o = sdqc(&[
        "hull", "--input", &input, "--resolution", "129",
        "--out-csv", csv.to_str().unwrap(),
        "--out-svg", svg.to_str().unwrap(),
        "--out-json", json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["connected"], true);
    assert_eq!(v["resolution"], 129);
    let on_disk: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(on_disk, v);
    let csv = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(csv.lines().count(), 130);
    let mid = csv.lines().nth(65).unwrap();
    let q: f64 = mid.split(',').nth(1).unwrap().parse().unwrap();
    assert!((q - 0.901_387_818_865_997).abs() < 1e-9, "{mid}");
    let svg = std::fs::read_to_string(&svg).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("id=\"hull\"") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "s.json",
        r#"{"points": [[0.7, 1.2]], "arcs": [{"center": [-0.2, 0], "radius": 0.6, "half": "upper"}]}"#,
    );
    let run = |threads: &str| {
        let csv = dir.path().join(format!("{threads}.csv"));
        let o = Command::new(env!("CARGO_BIN_EXE_sdqc"))
            .args(["hull", "--input", &input, "--resolution", "200", "--out-csv", csv.to_str().unwrap()])
            .env("SDQC_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success());
        (o.stdout, std::fs::read(csv).unwrap())
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn membership_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "m.json", r#"{"points": [[0, 0], [1, 0.8660254037844386]]}"#);
    let o = sdqc(&["membership", "--input", &input, "--matrix", "1,0,0;0,0.25,0;0,0,0.25"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["verdict"], "PhiMemberOnly");
    assert!((v["phi"][0].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["phi"][1].as_f64().unwrap() - 3f64.sqrt() / 4.0).abs() < 1e-12);

    let o = sdqc(&["membership", "--input", &input, "--matrix", "-5,0,0;0,-5,0;0,0,-5"]);
    assert_eq!(stdout_json(&o)["verdict"], "NotMember");
    assert!(stdout_json(&o)["witness"].is_object());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "g.json", r#"{"points": [[0, 1]]}"#);
    let empty = write(dir.path(), "e.json", "{}");
    let broken = write(dir.path(), "b.json", "{\"points\": [[0, -1]]}");
    let code = |a: &[&str]| sdqc(a).status.code().unwrap();
    assert_eq!(code(&["membership", "--input", &good, "--matrix", "1,2;3,4"]), 2);
    assert_eq!(code(&["hull", "--input", &empty]), 3);
    assert_eq!(code(&["hull", "--input", &broken]), 2);
    assert_eq!(code(&["hull", "--input", "/nonexistent/x.json"]), 2);
    assert_eq!(code(&["hull", "--input", &good, "--resolution", "8"]), 2);
    assert_eq!(code(&["examples", "--case", "nope"]), 2);
    assert_eq!(code(&["verify", "--suite", "nope"]), 2);
    assert_eq!(code(&["bogus"]), 2);
    let o = sdqc(&["hull", "--input", &empty]);
    assert!(!o.stderr.is_empty());
}

#[test]
fn verify_suites() {
    let o = sdqc(&["verify", "--suite", "det-counterexample"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["violations"], 1);
    assert_eq!(v["passed"], true);
    let o = sdqc(&["verify", "--suite", "tartar", "--trials", "30", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["violations"], 0);
}

#[test]
fn examples_and_oracle_compare() {
    for case in ["two-point", "circle-point-I", "circle-point-II", "non-cylindrical", "two-matrix"] {
        let o = sdqc(&["examples", "--case", case, "--resolution", "128"]);
        assert_eq!(o.status.code(), Some(0), "{case}: {}", String::from_utf8_lossy(&o.stderr));
        stdout_json(&o);
    }
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "o.json", r#"{"points": [[-0.5, 1], [0.5, 1]]}"#);
    let o = sdqc(&["oracle-compare", "--input", &input, "--resolution", "128"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["within_tolerance"], true);
}

#[test]
fn membership_needs_three_by_three() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "m.json", r#"{"points": [[0, 1]]}"#);
    let o = sdqc(&["membership", "--input", &input, "--matrix", "1,0;0,1"]);
    assert_eq!(o.status.code(), Some(2));
}
